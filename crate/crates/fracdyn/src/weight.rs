//! The Bielecki-type weighted norm and metric in which the Picard operator
//! contracts.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{intersect, GridFunction};
use crate::grid::{same_grid, TimeScaleGrid};
use crate::scalar::Real;

/// Weight context: eta > 0, base point t_0, and the cached time-scale
/// exponential e_eta(t_i, t_0) at every grid point at or after t_0.
///
/// e_eta is the product of (1 + mu(t_j) eta) over grains between t_0 and t;
/// it solves x^Delta = eta x with x(t_0) = 1 and is used uniformly for all
/// grid kinds so the identity  integral of eta e_eta  =  e_eta - 1  holds
/// exactly on every grid.
#[derive(Clone, Debug)]
pub struct WeightedNormContext<R: Real> {
    grid: Arc<TimeScaleGrid<R>>,
    eta: R,
    t0_index: usize,
    exp_cache: Vec<R>,
}

impl<R: Real> WeightedNormContext<R> {
    pub fn new(grid: Arc<TimeScaleGrid<R>>, eta: R, t0_index: usize) -> Result<Self> {
        if !(eta > R::zero()) || !eta.is_finite() {
            return Err(Error::Domain(format!("eta must be positive, got {eta}")));
        }
        grid.check_index(t0_index)?;
        let mut exp_cache = vec![R::zero(); grid.len()];
        let mut acc = R::one();
        exp_cache[t0_index] = acc;
        for i in t0_index..grid.last_index() {
            acc = acc * (R::one() + grid.graininess(i)? * eta);
            exp_cache[i + 1] = acc;
        }
        Ok(Self {
            grid,
            eta,
            t0_index,
            exp_cache,
        })
    }

    pub fn grid(&self) -> &Arc<TimeScaleGrid<R>> {
        &self.grid
    }

    pub fn eta(&self) -> R {
        self.eta
    }

    pub fn t0_index(&self) -> usize {
        self.t0_index
    }

    /// e_eta(t_i, t_0). Errors for t_i < t_0.
    pub fn exp_eta(&self, i: usize) -> Result<R> {
        self.grid.check_index(i)?;
        if i < self.t0_index {
            return Err(Error::Domain(format!(
                "e_eta undefined left of the base point (index {i} < {})",
                self.t0_index
            )));
        }
        Ok(self.exp_cache[i])
    }
}

/// sup over defined points of |f(t)| / e_eta(t, t_0).
pub fn weighted_norm<R: Real>(f: &GridFunction<R>, ctx: &WeightedNormContext<R>) -> Result<R> {
    if !same_grid(f.grid(), ctx.grid()) {
        return Err(Error::GridMismatch);
    }
    let def = f.defined();
    let start = def.start.max(ctx.t0_index);
    if start >= def.end {
        return Err(Error::Domain("no defined points at or after t0".into()));
    }
    let mut sup = R::zero();
    for i in start..def.end {
        let r = f.values()[i].abs() / ctx.exp_cache[i];
        if r > sup {
            sup = r;
        }
    }
    Ok(sup)
}

/// m_eta(f, g) = weighted norm of f - g on the common defined range.
pub fn weighted_metric<R: Real>(
    f: &GridFunction<R>,
    g: &GridFunction<R>,
    ctx: &WeightedNormContext<R>,
) -> Result<R> {
    if !same_grid(f.grid(), g.grid()) || !same_grid(f.grid(), ctx.grid()) {
        return Err(Error::GridMismatch);
    }
    let def = intersect(&f.defined(), &g.defined())?;
    let start = def.start.max(ctx.t0_index);
    if start >= def.end {
        return Err(Error::Domain("no defined points at or after t0".into()));
    }
    let mut sup = R::zero();
    for i in start..def.end {
        let r = (f.values()[i] - g.values()[i]).abs() / ctx.exp_cache[i];
        if r > sup {
            sup = r;
        }
    }
    Ok(sup)
}
