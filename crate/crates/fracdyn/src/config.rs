//! Plain-text `key = value` configuration files and the grid / rhs
//! descriptors they contain.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::read_pairs;
use crate::grid::TimeScaleGrid;
use crate::solver::Rhs;

/// Parsed `key = value` file; `#` starts a comment, blank lines ignored.
#[derive(Debug, Clone)]
pub struct Config {
    entries: BTreeMap<String, String>,
    /// directory of the config file, for resolving relative `file:` paths
    base_dir: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { entries, base_dir })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse(&text, base)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key {key:?}")))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key {key:?}: bad integer {v:?}"))),
            None => Ok(default),
        }
    }

    pub fn resolve_path(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Grid descriptor: `uniform(a,b,n)`, `lattice(a,b,h)`, or `file:<path>`.
    pub fn grid(&self, key: &str) -> Result<Arc<TimeScaleGrid<f64>>> {
        parse_grid_descriptor(self.require(key)?, &self.base_dir)
    }

    /// Rhs descriptor: `zero`, `linear(l)`, `affine(l,c)`, `logistic(r,k)`,
    /// or `custom-table:<path>` holding `t,value` rows aligned with the grid.
    pub fn rhs(&self, key: &str, grid: &Arc<TimeScaleGrid<f64>>) -> Result<Rhs<f64>> {
        parse_rhs_descriptor(self.require(key)?, grid, &self.base_dir)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("key {key:?}: bad number {v:?}")))
}

fn split_args<'a>(desc: &'a str, name: &str) -> Result<Vec<&'a str>> {
    let inner = desc
        .strip_prefix(name)
        .and_then(|s| s.strip_prefix('('))
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Config(format!("malformed descriptor {desc:?}")))?;
    Ok(inner.split(',').map(|s| s.trim()).collect())
}

pub fn parse_grid_descriptor(desc: &str, base_dir: &Path) -> Result<Arc<TimeScaleGrid<f64>>> {
    let desc = desc.trim();
    if let Some(path) = desc.strip_prefix("file:") {
        let p = Path::new(path.trim());
        let p = if p.is_absolute() {
            p.to_path_buf()
        } else {
            base_dir.join(p)
        };
        return TimeScaleGrid::read_text_file(&p);
    }
    if desc.starts_with("uniform") {
        let args = split_args(desc, "uniform")?;
        if args.len() != 3 {
            return Err(Error::Config(format!("uniform needs (a,b,n): {desc:?}")));
        }
        let a = parse_f64("uniform.a", args[0])?;
        let b = parse_f64("uniform.b", args[1])?;
        let n: usize = args[2]
            .parse()
            .map_err(|_| Error::Config(format!("uniform.n: bad integer {:?}", args[2])))?;
        return TimeScaleGrid::uniform(a, b, n);
    }
    if desc.starts_with("lattice") {
        let args = split_args(desc, "lattice")?;
        if args.len() != 3 {
            return Err(Error::Config(format!("lattice needs (a,b,h): {desc:?}")));
        }
        let a = parse_f64("lattice.a", args[0])?;
        let b = parse_f64("lattice.b", args[1])?;
        let h = parse_f64("lattice.h", args[2])?;
        return TimeScaleGrid::lattice(a, b, h);
    }
    Err(Error::Config(format!("unknown grid descriptor {desc:?}")))
}

pub fn parse_rhs_descriptor(
    desc: &str,
    grid: &Arc<TimeScaleGrid<f64>>,
    base_dir: &Path,
) -> Result<Rhs<f64>> {
    let desc = desc.trim();
    if desc == "zero" {
        return Ok(Rhs::Zero);
    }
    if let Some(path) = desc.strip_prefix("custom-table:") {
        let p = Path::new(path.trim());
        let p = if p.is_absolute() {
            p.to_path_buf()
        } else {
            base_dir.join(p)
        };
        let f = std::fs::File::open(&p)?;
        let pairs = read_pairs::<f64, _>(std::io::BufReader::new(f))?;
        if pairs.len() != grid.len() {
            return Err(Error::Config(format!(
                "custom-table has {} rows, grid has {} points",
                pairs.len(),
                grid.len()
            )));
        }
        return Ok(Rhs::Table(pairs.into_iter().map(|(_, v)| v).collect()));
    }
    if desc.starts_with("linear") {
        let args = split_args(desc, "linear")?;
        if args.len() != 1 {
            return Err(Error::Config(format!("linear needs (lambda): {desc:?}")));
        }
        return Ok(Rhs::Linear {
            lambda: parse_f64("linear.lambda", args[0])?,
        });
    }
    if desc.starts_with("affine") {
        let args = split_args(desc, "affine")?;
        if args.len() != 2 {
            return Err(Error::Config(format!("affine needs (lambda,c): {desc:?}")));
        }
        return Ok(Rhs::Affine {
            lambda: parse_f64("affine.lambda", args[0])?,
            c: parse_f64("affine.c", args[1])?,
        });
    }
    if desc.starts_with("logistic") {
        let args = split_args(desc, "logistic")?;
        if args.len() != 2 {
            return Err(Error::Config(format!("logistic needs (r,K): {desc:?}")));
        }
        return Ok(Rhs::Logistic {
            r: parse_f64("logistic.r", args[0])?,
            k: parse_f64("logistic.K", args[1])?,
        });
    }
    Err(Error::Config(format!("unknown rhs descriptor {desc:?}")))
}
