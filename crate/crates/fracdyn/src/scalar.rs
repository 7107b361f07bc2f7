//! Scalar abstraction: the toolkit is generic over the floating-point type.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar with the special functions the power-function
/// closed forms need. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Display + std::fmt::Debug + Send + Sync + 'static
{
    /// Natural log of the gamma function, valid for strictly positive arguments.
    fn ln_gamma_fn(self) -> Self;

    /// Gamma function, valid for strictly positive arguments.
    fn gamma_fn(self) -> Self;

    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar")
    }

    fn from_f64_(x: f64) -> Self {
        Self::from_f64(x).expect("f64 representable in scalar")
    }
}

impl Real for f64 {
    fn ln_gamma_fn(self) -> Self {
        statrs::function::gamma::ln_gamma(self)
    }

    fn gamma_fn(self) -> Self {
        statrs::function::gamma::gamma(self)
    }
}

impl Real for f32 {
    // f32 precision is limited by the downcast, not the evaluation.
    fn ln_gamma_fn(self) -> Self {
        statrs::function::gamma::ln_gamma(self as f64) as f32
    }

    fn gamma_fn(self) -> Self {
        statrs::function::gamma::gamma(self as f64) as f32
    }
}
