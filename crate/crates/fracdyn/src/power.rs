//! Generalized delta power functions h_alpha and their tabulation.
//!
//! Closed forms per grid kind:
//!
//! * ContinuousApprox: h_a(t, s) = (t - s)^a / Gamma(a + 1).
//! * UniformLattice (step h): h_a(t, s) = (t - s)_h^(a) / Gamma(a + 1) with
//!   the h-falling factorial (x)_h^(a) = h^a Gamma(x/h + 1) / Gamma(x/h + 1 - a),
//!   restricted to its causal support: the value is 0 when a > 0 and
//!   x/h < a. Integer orders have exactly this support (the falling factorial
//!   vanishes for fewer steps than the order), so the restriction is the
//!   integer behaviour carried to fractional orders; it also keeps every
//!   kernel nonnegative, which the Gronwall iteration requires.
//! * Arbitrary: integer orders only, by the recursion
//!   h_{k+1}(t, s) = integral over [s, t) of h_k(., s), with h_0 = 1.
//!
//! On ContinuousApprox grids a kernel of negative order is singular on the
//! diagonal; the diagonal value is taken as step^a / Gamma(a + 2), the exact
//! mean of the continuum kernel over one cell, so the one sum term whose
//! literal sample would be infinite carries the cell's true mass instead.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridKind, TimeScaleGrid};
use crate::scalar::Real;

/// A fractional order together with the integer m used by the derivative
/// definitions: m = floor(alpha) + 1 for non-integer alpha, m = alpha for
/// integer alpha.
#[derive(Clone, Copy, Debug)]
pub struct FractionalOrder<R: Real> {
    alpha: R,
    m: usize,
}

impl<R: Real> FractionalOrder<R> {
    pub fn new(alpha: R) -> Result<Self> {
        if !(alpha >= R::zero()) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "fractional order must be nonnegative, got {alpha}"
            )));
        }
        let m = if is_integer(alpha) {
            alpha.round().to_usize().unwrap_or(0)
        } else {
            alpha.floor().to_usize().unwrap_or(0) + 1
        };
        Ok(Self { alpha, m })
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        is_integer(self.alpha)
    }
}

pub(crate) fn is_integer<R: Real>(x: R) -> bool {
    (x - x.round()).abs() <= R::from_f64_(1e-12) * (R::one() + x.abs())
}

/// h-falling factorial power divided by Gamma(a+1), at m lattice steps.
fn lattice_h<R: Real>(order: R, m: usize, step: R) -> R {
    let mf = R::from_usize_(m);
    if order > R::zero() && mf < order - R::from_f64_(1e-12) * (R::one() + order) {
        return R::zero();
    }
    if is_integer(order) {
        let k = order.round().to_usize().expect("nonnegative integer order");
        // falling factorial m (m-1) ... (m-k+1) / k!, exact for small k
        let mut num = R::one();
        let mut den = R::one();
        for l in 0..k {
            num = num * (mf - R::from_usize_(l));
            den = den * R::from_usize_(l + 1);
        }
        return step.powi(k as i32) * num / den;
    }
    // all gamma arguments positive: m+1 >= 1 and m+1-order >= 1-order > 0
    let ln = order * step.ln() + (mf + R::one()).ln_gamma_fn()
        - (mf + R::one() - order).ln_gamma_fn()
        - (order + R::one()).ln_gamma_fn();
    ln.exp()
}

/// Continuum power x^a / Gamma(a+1) for x > 0; `step` feeds the diagonal
/// convention at x = 0.
fn continuum_h<R: Real>(order: R, x: R, step: R) -> R {
    if x <= R::zero() {
        if is_integer(order) && order.abs() < R::from_f64_(0.5) {
            return R::one(); // h_0 = 1 everywhere
        }
        if order > R::zero() {
            return R::zero();
        }
        return step.powf(order) / (order + R::one() + R::one()).gamma_fn();
    }
    if is_integer(order) {
        let k = order.round().to_i32().expect("integer order");
        let mut fact = R::one();
        for l in 1..=k {
            fact = fact * R::from_f64_(l as f64);
        }
        return x.powi(k) / fact;
    }
    x.powf(order) / (order + R::one()).gamma_fn()
}

/// h_alpha(t_i, t_j) for t_i >= t_j, alpha > -1.
pub fn power_function<R: Real>(
    grid: &Arc<TimeScaleGrid<R>>,
    alpha: R,
    i: usize,
    j: usize,
) -> Result<R> {
    grid.check_index(i)?;
    grid.check_index(j)?;
    if j > i {
        return Err(Error::Domain(format!(
            "power function needs t_i >= t_j, got indices i={i} < j={j}"
        )));
    }
    check_order(grid, alpha)?;
    match grid.kind() {
        GridKind::ContinuousApprox => {
            let step = grid.uniform_step().expect("uniform kind");
            let x = grid.points()[i] - grid.points()[j];
            Ok(continuum_h(alpha, x, step))
        }
        GridKind::UniformLattice => {
            let step = grid.uniform_step().expect("uniform kind");
            Ok(lattice_h(alpha, i - j, step))
        }
        GridKind::Arbitrary => {
            let k = alpha.round().to_usize().expect("checked integer order");
            Ok(recursion_column(grid, k, j)?[i])
        }
    }
}

fn check_order<R: Real>(grid: &Arc<TimeScaleGrid<R>>, alpha: R) -> Result<()> {
    if !(alpha > -R::one()) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "power function order must exceed -1, got {alpha}"
        )));
    }
    if grid.kind() == GridKind::Arbitrary && (!is_integer(alpha) || alpha < R::zero()) {
        return Err(Error::UnsupportedScale {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// h_k(t_i, t_j) for every i, at fixed base index j, by the integer recursion.
fn recursion_column<R: Real>(grid: &Arc<TimeScaleGrid<R>>, k: usize, j: usize) -> Result<Vec<R>> {
    let n = grid.len();
    let mut col = vec![R::zero(); n];
    for v in col.iter_mut().skip(j) {
        *v = R::one(); // h_0
    }
    for _ in 0..k {
        let mut next = vec![R::zero(); n];
        let mut acc = R::zero();
        for i in j..n {
            next[i] = acc;
            acc = acc + col[i] * grid.graininess(i)?;
        }
        col = next;
    }
    Ok(col)
}

/// Kernel evaluations h_order(t_i, .) precomputed for one order.
/// Uniform kinds reduce to a profile over step counts; Arbitrary grids hold
/// one recursion column per base point.
pub(crate) enum Kernel<R: Real> {
    Profile(Vec<R>),
    Columns(Vec<Vec<R>>),
}

impl<R: Real> Kernel<R> {
    pub(crate) fn new(grid: &Arc<TimeScaleGrid<R>>, order: R) -> Result<Self> {
        check_order(grid, order)?;
        let kernel = match grid.kind() {
            GridKind::ContinuousApprox => {
                let step = grid.uniform_step().expect("uniform kind");
                let t0 = grid.points()[0];
                Kernel::Profile(
                    (0..grid.len())
                        .map(|m| {
                            let x = if m == 0 {
                                R::zero()
                            } else {
                                grid.points()[m] - t0
                            };
                            continuum_h(order, x, step)
                        })
                        .collect(),
                )
            }
            GridKind::UniformLattice => {
                let step = grid.uniform_step().expect("uniform kind");
                Kernel::Profile((0..grid.len()).map(|m| lattice_h(order, m, step)).collect())
            }
            GridKind::Arbitrary => {
                let k = order.round().to_usize().expect("checked integer order");
                let cols = (0..grid.len())
                    .map(|j| recursion_column(grid, k, j))
                    .collect::<Result<Vec<_>>>()?;
                Kernel::Columns(cols)
            }
        };
        kernel.validate_nonnegative(order)?;
        Ok(kernel)
    }

    /// h_order(t_i, sigma(t_j)), the shifted kernel of the Delta convolution.
    pub(crate) fn shifted(&self, i: usize, j: usize) -> R {
        match self {
            Kernel::Profile(p) => p[i - j - 1],
            Kernel::Columns(cols) => cols[j + 1][i],
        }
    }

    /// h_order(t_i, t_j) without the sigma shift.
    pub(crate) fn base(&self, i: usize, j: usize) -> R {
        match self {
            Kernel::Profile(p) => p[i - j],
            Kernel::Columns(cols) => cols[j][i],
        }
    }

    // The Gronwall iteration assumes nonnegative kernels; fail fast if a
    // closed form ever produces a negative value.
    fn validate_nonnegative(&self, order: R) -> Result<()> {
        let check = |x: R, value: R| -> Result<()> {
            if value < R::zero() {
                return Err(Error::NegativeKernel {
                    order: order.to_f64().unwrap_or(f64::NAN),
                    x: x.to_f64().unwrap_or(f64::NAN),
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
            Ok(())
        };
        match self {
            Kernel::Profile(p) => {
                for (m, &v) in p.iter().enumerate() {
                    check(R::from_usize_(m), v)?;
                }
            }
            Kernel::Columns(cols) => {
                for (j, col) in cols.iter().enumerate() {
                    for (i, &v) in col.iter().enumerate().skip(j) {
                        check(R::from_usize_(i - j), v)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Tabulated h_alpha(t_i, sigma(t_j)) for j < i, plus the diagonal base
/// values h_alpha(t_i, t_i).
pub struct PowerFunctionTable<R: Real> {
    grid: Arc<TimeScaleGrid<R>>,
    alpha: R,
    shifted: Vec<Vec<R>>,
    diagonal: Vec<R>,
}

impl<R: Real> PowerFunctionTable<R> {
    pub fn new(grid: Arc<TimeScaleGrid<R>>, alpha: R) -> Result<Self> {
        let kernel = Kernel::new(&grid, alpha)?;
        let n = grid.len();
        let shifted = (0..n)
            .map(|i| (0..i).map(|j| kernel.shifted(i, j)).collect())
            .collect();
        let diagonal = (0..n).map(|i| kernel.base(i, i)).collect();
        Ok(Self {
            grid,
            alpha,
            shifted,
            diagonal,
        })
    }

    pub fn grid(&self) -> &Arc<TimeScaleGrid<R>> {
        &self.grid
    }

    pub fn alpha(&self) -> R {
        self.alpha
    }

    /// h_alpha(t_i, sigma(t_j)), j < i.
    pub fn entry(&self, i: usize, j: usize) -> Result<R> {
        self.grid.check_index(i)?;
        if j >= i {
            return Err(Error::Domain(format!(
                "table holds shifted entries for j < i, got i={i}, j={j}"
            )));
        }
        Ok(self.shifted[i][j])
    }

    /// h_alpha(t_i, t_i).
    pub fn diagonal(&self, i: usize) -> Result<R> {
        self.grid.check_index(i)?;
        Ok(self.diagonal[i])
    }

    /// CSV export with columns `i,j,t_i,sigma_t_j,h_alpha`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,t_i,sigma_t_j,h_alpha")?;
        let pts = self.grid.points();
        for i in 0..self.grid.len() {
            for j in 0..i {
                writeln!(
                    w,
                    "{i},{j},{},{},{}",
                    pts[i],
                    pts[j + 1],
                    self.shifted[i][j]
                )?;
            }
        }
        Ok(())
    }
}

/// |LHS - RHS| of the convolution identity
/// integral over [t_0, t_i) of h_{a-1}(t_i, sigma(tau)) h_{ka-1}(tau, sigma(t_j))
/// against h_{(k+1)a-1}(t_i, sigma(t_j)). The inner kernel vanishes for
/// tau < sigma(t_j), so the sum effectively starts there.
pub fn semigroup_residual<R: Real>(
    grid: &Arc<TimeScaleGrid<R>>,
    alpha: R,
    k: usize,
    i: usize,
    j: usize,
) -> Result<R> {
    grid.check_index(i)?;
    grid.check_index(j)?;
    if j >= i {
        return Err(Error::Domain(format!(
            "semigroup residual needs t_j < t_i, got i={i}, j={j}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("semigroup residual needs k >= 1".into()));
    }
    let kf = R::from_usize_(k);
    let outer = Kernel::new(grid, alpha - R::one())?;
    let inner = Kernel::new(grid, kf * alpha - R::one())?;
    let target = Kernel::new(grid, (kf + R::one()) * alpha - R::one())?;
    let mut lhs = R::zero();
    for p in (j + 1)..i {
        lhs = lhs + outer.shifted(i, p) * inner.shifted(p, j) * grid.graininess(p)?;
    }
    let rhs = target.shifted(i, j);
    Ok((lhs - rhs).abs())
}

/// Max semigroup residual over all pairs j < i (or a coarse index subsample
/// for large grids).
pub fn max_semigroup_residual<R: Real>(
    grid: &Arc<TimeScaleGrid<R>>,
    alpha: R,
    k: usize,
    max_pairs_per_axis: usize,
) -> Result<R> {
    let n = grid.len();
    let stride = (n / max_pairs_per_axis).max(1);
    let mut worst = R::zero();
    let mut i = 1;
    while i < n {
        let mut j = 0;
        while j < i {
            let r = semigroup_residual(grid, alpha, k, i, j)?;
            if r > worst {
                worst = r;
            }
            j += stride;
        }
        i += stride;
    }
    Ok(worst)
}
