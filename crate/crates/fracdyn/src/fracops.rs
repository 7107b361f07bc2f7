//! Riemann-Liouville fractional delta integral and derivative, and the
//! Caputo fractional delta derivative.

use crate::error::{Error, Result};
use crate::function::{delta_derivative_fn, GridFunction};
use crate::power::{FractionalOrder, Kernel};
use crate::scalar::Real;

/// Riemann-Liouville fractional delta integral of order alpha >= 0:
///
/// (I^alpha f)(t) = integral over [t_0, t) of h_{alpha-1}(t, sigma(u)) f(u),
/// with I^0 f = f. The value at t_0 is 0 and points left of t_0 are
/// undefined in the result.
pub fn rl_integral<R: Real>(
    alpha: R,
    f: &GridFunction<R>,
    t0_index: usize,
) -> Result<GridFunction<R>> {
    let grid = f.grid().clone();
    grid.check_index(t0_index)?;
    if alpha < R::zero() {
        return Err(Error::Domain(format!(
            "rl_integral needs alpha >= 0 (got {alpha}); negative orders are derivatives"
        )));
    }
    if is_zero(alpha) {
        return Ok(f.clone());
    }
    let def = f.defined();
    if def.start > t0_index || def.end < grid.len() {
        return Err(Error::UndefinedValue {
            index: if def.start > t0_index {
                t0_index
            } else {
                def.end
            },
        });
    }
    rl_integral_skipping(alpha, f, t0_index)
}

/// Same sum, but silently skipping integrand points where `f` is undefined.
/// The solver uses this on ContinuousApprox grids where the inhomogeneous
/// term excludes the single point t = t_0.
pub(crate) fn rl_integral_skipping<R: Real>(
    alpha: R,
    f: &GridFunction<R>,
    t0_index: usize,
) -> Result<GridFunction<R>> {
    let grid = f.grid().clone();
    if is_zero(alpha) {
        return Ok(f.clone());
    }
    let kernel = Kernel::new(&grid, alpha - R::one())?;
    let def = f.defined();
    let n = grid.len();
    let mut out = vec![R::zero(); n];
    for (i, o) in out.iter_mut().enumerate().skip(t0_index) {
        let mut acc = R::zero();
        for tau in t0_index..i {
            if !def.contains(&tau) {
                continue;
            }
            acc = acc + kernel.shifted(i, tau) * f.values()[tau] * grid.graininess(tau)?;
        }
        *o = acc;
    }
    GridFunction::with_defined(grid.clone(), out, t0_index..n)
}

/// Riemann-Liouville fractional delta derivative:
/// D^alpha f = (Delta)^m I^{m-alpha} f with m = floor(alpha) + 1 (m = alpha
/// for integer alpha). Negative orders delegate to the fractional integral.
/// Trailing points lost to the m delta differences leave the defined range.
pub fn rl_derivative<R: Real>(
    alpha: R,
    f: &GridFunction<R>,
    s_index: usize,
) -> Result<GridFunction<R>> {
    if alpha < R::zero() {
        return rl_integral(-alpha, f, s_index);
    }
    let order = FractionalOrder::new(alpha)?;
    let m = order.m();
    if m == 0 {
        return Ok(f.clone());
    }
    let mf = R::from_usize_(m);
    let mut g = rl_integral(mf - alpha, f, s_index)?;
    for _ in 0..m {
        g = delta_derivative_fn(&g)?;
    }
    Ok(g)
}

/// Caputo fractional delta derivative of order alpha > 0:
/// the Riemann-Liouville derivative applied to f minus its degree-(m-1)
/// time-scale Taylor polynomial at t_0.
pub fn caputo_derivative<R: Real>(
    alpha: R,
    f: &GridFunction<R>,
    t0_index: usize,
) -> Result<GridFunction<R>> {
    if !(alpha > R::zero()) {
        return Err(Error::Domain(format!(
            "caputo derivative needs alpha > 0, got {alpha}"
        )));
    }
    let grid = f.grid().clone();
    grid.check_index(t0_index)?;
    let order = FractionalOrder::new(alpha)?;
    let m = order.m();

    // f^{Delta^k}(t_0) for k = 0 .. m-1
    let def = f.defined();
    if def.start > t0_index || def.end.saturating_sub(t0_index) < m {
        return Err(Error::InsufficientGrid {
            needed: m,
            available: def.end.saturating_sub(t0_index.max(def.start)),
        });
    }
    let mut coeffs = Vec::with_capacity(m);
    let mut level = f.clone();
    for k in 0..m {
        coeffs.push(level.value(t0_index)?);
        if k + 1 < m {
            level = delta_derivative_fn(&level)?;
        }
    }

    // Taylor remainder r(t) = f(t) - sum_k h_k(t, t_0) f^{Delta^k}(t_0)
    let mut taylor = vec![R::zero(); grid.len()];
    for (k, &c) in coeffs.iter().enumerate() {
        let kernel = Kernel::new(&grid, R::from_usize_(k))?;
        for (i, tv) in taylor.iter_mut().enumerate().skip(t0_index) {
            *tv = *tv + kernel.base(i, t0_index) * c;
        }
    }
    let mut r_values = f.values().to_vec();
    for i in 0..grid.len() {
        if def.contains(&i) && i >= t0_index {
            r_values[i] = r_values[i] - taylor[i];
        }
    }
    let r = GridFunction::with_defined(grid, r_values, t0_index.max(def.start)..def.end)?;
    rl_derivative(alpha, &r, t0_index)
}

fn is_zero<R: Real>(x: R) -> bool {
    x.abs() <= R::from_f64_(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeScaleGrid;
    use std::sync::Arc;

    fn zgrid(n: usize) -> Arc<TimeScaleGrid<f64>> {
        TimeScaleGrid::lattice(0.0, n as f64, 1.0).unwrap()
    }

    #[test]
    fn order_zero_is_identity() {
        let f = GridFunction::sample(zgrid(4), |t| t * t - 1.0).unwrap();
        let g = rl_integral(0.0, &f, 0).unwrap();
        assert_eq!(f.values(), g.values());
        let d = rl_derivative(0.0, &f, 0).unwrap();
        assert_eq!(f.values(), d.values());
    }

    #[test]
    fn order_one_is_plain_delta_integral() {
        let f = GridFunction::constant(zgrid(4), 1.0).unwrap();
        let g = rl_integral(1.0, &f, 0).unwrap();
        assert_eq!(g.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn negative_alpha_is_domain_error_for_integral() {
        let f = GridFunction::constant(zgrid(4), 1.0).unwrap();
        assert!(rl_integral(-0.5, &f, 0).is_err());
    }

    #[test]
    fn rl_derivative_order_one_is_forward_difference() {
        let g = zgrid(6);
        let f = GridFunction::sample(g, |t| t).unwrap();
        let d = rl_derivative(1.0, &f, 0).unwrap();
        assert_eq!(d.defined(), 0..6);
        for i in 0..6 {
            assert!((d.value(i).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(d.value(6).is_err());
    }

    #[test]
    fn rl_derivative_negative_order_integrates() {
        let f = GridFunction::constant(zgrid(4), 1.0).unwrap();
        let d = rl_derivative(-1.0, &f, 0).unwrap();
        assert_eq!(d.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn caputo_of_constant_vanishes() {
        for alpha in [0.3, 0.5, 0.8] {
            let f = GridFunction::constant(zgrid(10), 4.2).unwrap();
            let d = caputo_derivative(alpha, &f, 0).unwrap();
            for i in d.defined() {
                assert!(d.value(i).unwrap().abs() <= 1e-12, "alpha={alpha}");
            }
        }
    }

    #[test]
    fn caputo_alpha_one_is_difference_of_centred_f() {
        // m = 1 for alpha = 1: Caputo^1 f = Delta(f - f(t_0)), exactly the
        // forward difference; for f = t^2 on Z that is 2t + 1.
        let g = zgrid(6);
        let f = GridFunction::sample(g, |t| t * t).unwrap();
        let d = caputo_derivative(1.0, &f, 0).unwrap();
        for i in d.defined() {
            assert_eq!(d.value(i).unwrap(), 2.0 * i as f64 + 1.0);
        }
    }

    #[test]
    fn caputo_needs_positive_order() {
        let f = GridFunction::constant(zgrid(4), 1.0).unwrap();
        assert!(caputo_derivative(0.0, &f, 0).is_err());
    }

    #[test]
    fn insufficient_grid_reported() {
        let g = TimeScaleGrid::lattice(0.0, 1.0, 1.0).unwrap(); // 2 points
        let f = GridFunction::sample(g, |t| t).unwrap();
        // alpha = 1.5 needs m = 2 differences; only one available
        assert!(matches!(
            rl_derivative(1.5, &f, 0),
            Err(Error::InsufficientGrid { .. })
        ));
    }
}
