//! Grid-sampled real functions and the primitive delta calculus.

use std::io::{BufRead, Write};
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{same_grid, TimeScaleGrid};
use crate::scalar::Real;

/// A real-valued function sampled at every grid point.
///
/// `defined` tracks the index range on which the values are meaningful.
/// Repeated delta differencing shrinks it from the right; the singular
/// inhomogeneous term of the fractional Cauchy problem shrinks it from the
/// left on ContinuousApprox grids. Values outside the range are never read.
#[derive(Clone, Debug)]
pub struct GridFunction<R: Real> {
    grid: Arc<TimeScaleGrid<R>>,
    values: Vec<R>,
    defined: Range<usize>,
}

impl<R: Real> GridFunction<R> {
    pub fn new(grid: Arc<TimeScaleGrid<R>>, values: Vec<R>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "value count {} != grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid function values must be finite".into()));
        }
        let defined = 0..grid.len();
        Ok(Self {
            grid,
            values,
            defined,
        })
    }

    /// Builds from values with an explicit defined range; values outside the
    /// range are stored as-is but never read.
    pub fn with_defined(
        grid: Arc<TimeScaleGrid<R>>,
        values: Vec<R>,
        defined: Range<usize>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "value count {} != grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if defined.end > grid.len() || defined.is_empty() {
            return Err(Error::Domain(format!(
                "invalid defined range {defined:?} on {} points",
                grid.len()
            )));
        }
        if values[defined.clone()].iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "grid function values must be finite on the defined range".into(),
            ));
        }
        Ok(Self {
            grid,
            values,
            defined,
        })
    }

    pub fn constant(grid: Arc<TimeScaleGrid<R>>, c: R) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![c; n])
    }

    pub fn zeros(grid: Arc<TimeScaleGrid<R>>) -> Result<Self> {
        Self::constant(grid, R::zero())
    }

    /// Samples a closure at every grid point.
    pub fn sample<F: Fn(R) -> R>(grid: Arc<TimeScaleGrid<R>>, f: F) -> Result<Self> {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<TimeScaleGrid<R>> {
        &self.grid
    }

    pub fn defined(&self) -> Range<usize> {
        self.defined.clone()
    }

    pub fn is_defined_at(&self, i: usize) -> bool {
        self.defined.contains(&i)
    }

    pub fn value(&self, i: usize) -> Result<R> {
        self.grid.check_index(i)?;
        if self.defined.contains(&i) {
            Ok(self.values[i])
        } else {
            Err(Error::UndefinedValue { index: i })
        }
    }

    /// Raw value access; callers must respect the defined range.
    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn map<F: Fn(R) -> R>(&self, f: F) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self::with_defined(self.grid.clone(), values, self.defined.clone())
    }

    /// Pointwise combination on the intersection of defined ranges.
    pub fn zip_with<F: Fn(R, R) -> R>(&self, other: &Self, f: F) -> Result<Self> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let defined = intersect(&self.defined, &other.defined)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| {
                if defined.contains(&i) {
                    f(a, b)
                } else {
                    R::zero()
                }
            })
            .collect();
        Self::with_defined(self.grid.clone(), values, defined)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn abs_diff(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| (a - b).abs())
    }

    /// Two-column CSV `t,value`, restricted to the defined range.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for i in self.defined.clone() {
            writeln!(w, "{},{}", self.grid.points()[i], self.values[i])?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Reads `t,value` CSV sampled at exactly the given grid's points.
    pub fn read_csv<B: BufRead>(r: B, grid: Arc<TimeScaleGrid<R>>) -> Result<Self>
    where
        R: std::str::FromStr,
    {
        let pairs = read_pairs::<R, B>(r)?;
        if pairs.len() != grid.len() {
            return Err(Error::Parse(format!(
                "csv has {} rows, grid has {} points",
                pairs.len(),
                grid.len()
            )));
        }
        let mut values = Vec::with_capacity(pairs.len());
        for (i, (t, v)) in pairs.into_iter().enumerate() {
            let gt = grid.points()[i];
            if (t - gt).abs() > (R::epsilon() * (R::one() + gt.abs())) * R::from_f64_(8.0) {
                return Err(Error::Parse(format!(
                    "csv abscissa {t} does not match grid point {gt} at row {i}"
                )));
            }
            values.push(v);
        }
        Self::new(grid, values)
    }

    pub fn read_csv_file(path: &std::path::Path, grid: Arc<TimeScaleGrid<R>>) -> Result<Self>
    where
        R: std::str::FromStr,
    {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f), grid)
    }
}

/// Parses two-column `t,value` CSV into raw pairs.
pub fn read_pairs<R: Real + std::str::FromStr, B: BufRead>(r: B) -> Result<Vec<(R, R)>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line == "t,value") {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected t,value at line {}", lineno + 1)))?;
        let t: R = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number {a:?}")))?;
        let v: R = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number {b:?}")))?;
        out.push((t, v));
    }
    if out.is_empty() {
        return Err(Error::Parse("empty csv".into()));
    }
    Ok(out)
}

pub(crate) fn intersect(a: &Range<usize>, b: &Range<usize>) -> Result<Range<usize>> {
    let start = a.start.max(b.start);
    let end = a.end.min(b.end);
    if start >= end {
        return Err(Error::Domain("empty defined-range intersection".into()));
    }
    Ok(start..end)
}

/// Delta (Hilger) derivative at index i: (f(sigma(t)) - f(t)) / mu(t).
/// Undefined at the terminal point.
pub fn delta_derivative<R: Real>(f: &GridFunction<R>, i: usize) -> Result<R> {
    let grid = f.grid();
    grid.check_index(i)?;
    if i == grid.last_index() {
        return Err(Error::TerminalPoint { index: i });
    }
    let fi = f.value(i)?;
    let fs = f.value(i + 1)?;
    Ok((fs - fi) / grid.graininess(i)?)
}

/// One whole-grid delta difference; the defined range shrinks by one on the right.
pub fn delta_derivative_fn<R: Real>(f: &GridFunction<R>) -> Result<GridFunction<R>> {
    let grid = f.grid().clone();
    let def = f.defined();
    if def.end - def.start < 2 {
        return Err(Error::InsufficientGrid {
            needed: 1,
            available: def.end - def.start,
        });
    }
    let mut values = vec![R::zero(); grid.len()];
    for (i, v) in values
        .iter_mut()
        .enumerate()
        .take(def.end - 1)
        .skip(def.start)
    {
        *v = (f.values()[i + 1] - f.values()[i]) / grid.graininess(i)?;
    }
    GridFunction::with_defined(grid, values, def.start..def.end - 1)
}

/// Left-endpoint Cauchy delta integral over [t_a, t_b):
/// sum of f(t_i) mu(t_i) for a <= i < b. Exact on discrete scales.
pub fn delta_integral<R: Real>(f: &GridFunction<R>, a: usize, b: usize) -> Result<R> {
    let grid = f.grid();
    grid.check_index(a)?;
    grid.check_index(b)?;
    if a > b {
        return Err(Error::InvalidInterval { a, b });
    }
    let mut acc = R::zero();
    for i in a..b {
        acc = acc + f.value(i)? * grid.graininess(i)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind;

    fn zgrid(n: usize) -> Arc<TimeScaleGrid<f64>> {
        TimeScaleGrid::lattice(0.0, n as f64, 1.0).unwrap()
    }

    #[test]
    fn delta_derivative_of_square_on_z() {
        // forward difference of t^2 is 2t + 1
        let g = zgrid(5);
        let f = GridFunction::sample(g, |t| t * t).unwrap();
        for i in 0..5 {
            assert_eq!(delta_derivative(&f, i).unwrap(), 2.0 * i as f64 + 1.0);
        }
        assert!(matches!(
            delta_derivative(&f, 5),
            Err(Error::TerminalPoint { .. })
        ));
    }

    #[test]
    fn delta_derivative_constant_is_zero() {
        let f = GridFunction::constant(zgrid(4), 3.25).unwrap();
        for i in 0..4 {
            assert_eq!(delta_derivative(&f, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_derivative_linear_on_nonuniform() {
        let g = TimeScaleGrid::from_points(vec![0.0, 0.5, 2.0], GridKind::Arbitrary).unwrap();
        let f = GridFunction::sample(g, |t| t).unwrap();
        assert_eq!(delta_derivative(&f, 0).unwrap(), 1.0);
        assert_eq!(delta_derivative(&f, 1).unwrap(), 1.0);
    }

    #[test]
    fn delta_integral_lattice_sum() {
        let g = zgrid(5);
        let f = GridFunction::sample(g, |t| t).unwrap();
        assert_eq!(delta_integral(&f, 0, 3).unwrap(), 3.0); // 0 + 1 + 2
        assert_eq!(delta_integral(&f, 2, 2).unwrap(), 0.0);
        assert!(delta_integral(&f, 3, 1).is_err());
    }

    #[test]
    fn delta_integral_continuous_approx() {
        let g: Arc<TimeScaleGrid<f64>> = TimeScaleGrid::uniform(0.0, 1.0, 1000).unwrap();
        let f = GridFunction::sample(g.clone(), |t| t).unwrap();
        let v = delta_integral(&f, 0, g.last_index()).unwrap();
        assert!((v - 0.4995).abs() < 1e-12);
        assert!((v - 0.5).abs() < 1e-3);
    }

    #[test]
    fn fundamental_theorem_exact_on_discrete() {
        let g: Arc<TimeScaleGrid<f64>> =
            TimeScaleGrid::from_points(vec![0.0, 0.3, 1.1, 1.15, 4.0], GridKind::Arbitrary)
                .unwrap();
        let f = GridFunction::sample(g.clone(), |t| t * t - 3.0 * t + 1.0).unwrap();
        let df = delta_derivative_fn(&f).unwrap();
        let lhs = delta_integral(&df, 0, 4).unwrap();
        let rhs = f.value(4).unwrap() - f.value(0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn defined_range_blocks_reads() {
        let g = zgrid(4);
        let f = GridFunction::with_defined(g, vec![9.0, 1.0, 2.0, 3.0, 4.0], 1..5).unwrap();
        assert!(matches!(f.value(0), Err(Error::UndefinedValue { .. })));
        assert_eq!(f.value(1).unwrap(), 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let g = zgrid(3);
        let f = GridFunction::sample(g.clone(), |t| 1.0 / (1.0 + t)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(std::io::Cursor::new(buf), g).unwrap();
        assert_eq!(f.values(), back.values());
    }
}
