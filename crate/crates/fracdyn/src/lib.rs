//! fracdyn: fractional delta calculus and Caputo-type dynamic equations on
//! bounded time scales.
//!
//! The crate represents a bounded time scale as a finite strictly increasing
//! grid and builds, in order:
//!
//! * the primitive delta calculus (jump operators, graininess, delta
//!   derivative and integral, the time-scale exponential, and the
//!   eta-weighted norm and metric),
//! * generalized delta power functions h_alpha with per-kind closed forms
//!   and their tabulation,
//! * Riemann-Liouville fractional delta integral/derivative and the Caputo
//!   fractional delta derivative,
//! * the generalized Gronwall series bound with truncation diagnostics and a
//!   dominance verifier,
//! * a Picard solver for Caputo-type Cauchy problems with contraction
//!   certificates and a continuous-dependence certifier,
//! * a seeded verification suite behind the `verify` module.
//!
//! All core types are generic over the scalar through [`Real`]; `f64` is the
//! working precision and the aliases below name the common instantiations.

// validation guards use `!(x > 0)` on purpose: the negation rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fracops;
pub mod function;
pub mod grid;
pub mod gronwall;
pub mod power;
pub mod scalar;
pub mod solver;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
pub use fracops::{caputo_derivative, rl_derivative, rl_integral};
pub use function::{delta_derivative, delta_derivative_fn, delta_integral, GridFunction};
pub use grid::{GridKind, TimeScaleGrid};
pub use gronwall::{
    apply_q, gronwall_bound, gronwall_series, hypothesis_fixed_point, iterated_q_bound,
    verify_dominance, BoundReport, GronwallInput,
};
pub use power::{
    max_semigroup_residual, power_function, semigroup_residual, FractionalOrder, PowerFunctionTable,
};
pub use scalar::Real;
pub use solver::{
    apply_g, compute_p1, dependence_certify, dependence_h, picard_solve, picard_solve_from,
    picard_solve_partial, CauchyProblem, DependenceInput, Representation, Rhs, SolveResult,
};
pub use weight::{weighted_metric, weighted_norm, WeightedNormContext};

/// Working-precision aliases.
pub type Grid64 = TimeScaleGrid<f64>;
pub type GridFn64 = GridFunction<f64>;
pub type Problem64 = CauchyProblem<f64>;
pub type Grid32 = TimeScaleGrid<f32>;
pub type GridFn32 = GridFunction<f32>;
