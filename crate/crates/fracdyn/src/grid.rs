//! Bounded time scales represented as finite strictly increasing grids.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// What kind of time scale the grid stands in for. The tag decides which
/// closed form the generalized power functions use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// Uniform fine grid standing in for an interval of the reals.
    ContinuousApprox,
    /// h-multiples of the integers with step h > 0, treated exactly.
    UniformLattice,
    /// Any strictly increasing finite point set, treated exactly.
    Arbitrary,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::ContinuousApprox => "continuous-approx",
            GridKind::UniformLattice => "uniform-lattice",
            GridKind::Arbitrary => "arbitrary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "continuous-approx" => Ok(GridKind::ContinuousApprox),
            "uniform-lattice" => Ok(GridKind::UniformLattice),
            "arbitrary" => Ok(GridKind::Arbitrary),
            other => Err(Error::Parse(format!("unknown grid kind {other:?}"))),
        }
    }
}

/// A finite time scale: strictly increasing points t_0 < t_1 < ... < t_N.
///
/// The forward jump operator maps each point to its successor and fixes the
/// terminal point, so the graininess mu(t_N) = 0 and the terminal point never
/// contributes to delta integrals.
#[derive(Debug, PartialEq)]
pub struct TimeScaleGrid<R: Real> {
    points: Vec<R>,
    kind: GridKind,
}

impl<R: Real> TimeScaleGrid<R> {
    /// Builds a grid from an explicit point list.
    pub fn from_points(points: Vec<R>, kind: GridKind) -> Result<Arc<Self>> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(format!(
                    "grid points must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("grid points must be finite".into()));
        }
        if kind != GridKind::Arbitrary {
            let h = points[1] - points[0];
            let tol = h * R::from_f64_(1e-9);
            for w in points.windows(2) {
                if ((w[1] - w[0]) - h).abs() > tol {
                    return Err(Error::Domain(format!(
                        "{} grid requires uniform spacing ({} vs {})",
                        kind.name(),
                        w[1] - w[0],
                        h
                    )));
                }
            }
        }
        Ok(Arc::new(Self { points, kind }))
    }

    /// `uniform(a, b, n)`: n subintervals of [a, b], tagged ContinuousApprox.
    pub fn uniform(a: R, b: R, n: usize) -> Result<Arc<Self>> {
        if !(b > a) || n == 0 {
            return Err(Error::Domain(format!("invalid uniform({a}, {b}, {n})")));
        }
        let nf = R::from_usize_(n);
        let step = (b - a) / nf;
        let points = (0..=n)
            .map(|i| {
                if i == n {
                    b
                } else {
                    a + step * R::from_usize_(i)
                }
            })
            .collect();
        Ok(Arc::new(Self {
            points,
            kind: GridKind::ContinuousApprox,
        }))
    }

    /// `lattice(a, b, h)`: a, a+h, a+2h, ... up to b, tagged UniformLattice.
    pub fn lattice(a: R, b: R, h: R) -> Result<Arc<Self>> {
        if !(h > R::zero()) || !(b > a) {
            return Err(Error::Domain(format!("invalid lattice({a}, {b}, {h})")));
        }
        let steps = ((b - a) / h)
            .round()
            .to_usize()
            .ok_or_else(|| Error::Domain("lattice span not representable".into()))?;
        if steps == 0 {
            return Err(Error::Domain("lattice has a single point".into()));
        }
        let points = (0..=steps).map(|i| a + h * R::from_usize_(i)).collect();
        Ok(Arc::new(Self {
            points,
            kind: GridKind::UniformLattice,
        }))
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Number of points (N + 1).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the terminal point N.
    pub fn last_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[R] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Result<R> {
        self.points.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    /// Forward jump operator on indices: sigma(i) = i + 1, terminal point fixed.
    pub fn sigma(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        Ok(if i < self.last_index() { i + 1 } else { i })
    }

    /// Graininess mu(t_i) = t_{i+1} - t_i, zero at the terminal point.
    pub fn graininess(&self, i: usize) -> Result<R> {
        self.check_index(i)?;
        if i < self.last_index() {
            Ok(self.points[i + 1] - self.points[i])
        } else {
            Ok(R::zero())
        }
    }

    /// Common step for uniformly spaced kinds.
    pub fn uniform_step(&self) -> Option<R> {
        match self.kind {
            GridKind::Arbitrary => None,
            _ => Some(self.points[1] - self.points[0]),
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.points.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            })
        }
    }

    /// Plain-text serialization: `kind=<name>` header then one point per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "kind={}", self.kind.name())?;
        for p in &self.points {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }

    pub fn read_text<B: BufRead>(r: B) -> Result<Arc<Self>>
    where
        R: std::str::FromStr,
    {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid file".into()))??;
        let kind_name = header
            .strip_prefix("kind=")
            .ok_or_else(|| Error::Parse(format!("expected kind=<name> header, got {header:?}")))?;
        let kind = GridKind::parse(kind_name.trim())?;
        let mut points = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: R = line
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid point {line:?}")))?;
            points.push(v);
        }
        Self::from_points(points, kind)
    }

    pub fn write_text_file(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(f))
    }

    pub fn read_text_file(path: &std::path::Path) -> Result<Arc<Self>>
    where
        R: std::str::FromStr,
    {
        let f = std::fs::File::open(path)?;
        Self::read_text(std::io::BufReader::new(f))
    }
}

/// Structural grid identity: same points and kind, or literally the same allocation.
pub fn same_grid<R: Real>(a: &Arc<TimeScaleGrid<R>>, b: &Arc<TimeScaleGrid<R>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zgrid(n: usize) -> Arc<TimeScaleGrid<f64>> {
        TimeScaleGrid::lattice(0.0, n as f64, 1.0).unwrap()
    }

    #[test]
    fn sigma_on_lattice() {
        let g = zgrid(5);
        assert_eq!(g.sigma(2).unwrap(), 3);
        assert_eq!(g.sigma(5).unwrap(), 5); // terminal point fixed
        assert!(g.sigma(6).is_err());
    }

    #[test]
    fn sigma_skips_to_next_point_regardless_of_spacing() {
        let g = TimeScaleGrid::from_points(vec![0.0, 0.5, 2.0], GridKind::Arbitrary).unwrap();
        assert_eq!(g.sigma(1).unwrap(), 2);
        assert_eq!(g.point(g.sigma(1).unwrap()).unwrap(), 2.0);
    }

    #[test]
    fn graininess_values() {
        let g = TimeScaleGrid::from_points(vec![0.0, 0.5, 2.0], GridKind::Arbitrary).unwrap();
        assert_eq!(g.graininess(1).unwrap(), 1.5);
        assert_eq!(g.graininess(2).unwrap(), 0.0);
        let z = zgrid(4);
        assert_eq!(z.graininess(1).unwrap(), 1.0);
    }

    #[test]
    fn rejects_non_increasing_points() {
        assert!(TimeScaleGrid::from_points(vec![0.0, 0.0, 1.0], GridKind::Arbitrary).is_err());
        assert!(TimeScaleGrid::from_points(vec![1.0, 0.5], GridKind::Arbitrary).is_err());
    }

    #[test]
    fn uniform_endpoints_exact() {
        let g: Arc<TimeScaleGrid<f64>> = TimeScaleGrid::uniform(0.0, 1.0, 1000).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g.point(0).unwrap(), 0.0);
        assert_eq!(g.point(1000).unwrap(), 1.0);
        assert_eq!(g.kind(), GridKind::ContinuousApprox);
    }

    #[test]
    fn text_round_trip() {
        let g = TimeScaleGrid::from_points(vec![0.0, 0.25, 1.0, 2.5], GridKind::Arbitrary).unwrap();
        let mut buf = Vec::new();
        g.write_text(&mut buf).unwrap();
        let back = TimeScaleGrid::<f64>::read_text(std::io::Cursor::new(buf)).unwrap();
        assert!(same_grid(&g, &back));
    }
}
