use thiserror::Error;

/// Errors raised by grid, operator, and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range (grid has {len} points)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operation undefined at the terminal grid point (index {index})")]
    TerminalPoint { index: usize },

    #[error("invalid interval: a={a} > b={b}")]
    InvalidInterval { a: usize, b: usize },

    #[error("grid mismatch: operands are defined on different grids")]
    GridMismatch,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fractional order {alpha} unsupported on Arbitrary scale (integer orders only)")]
    UnsupportedScale { alpha: f64 },

    #[error("grid too short: {needed} delta differences requested on {available} usable points")]
    InsufficientGrid { needed: usize, available: usize },

    #[error("negative kernel value h_{order}(x={x}) = {value}; power function validation failed")]
    NegativeKernel { order: f64, x: f64, value: f64 },

    #[error("right-hand side returned a non-finite value at t={t}, u={u}")]
    RhsEvaluation { t: f64, u: f64 },

    #[error(
        "series failed to reach tolerance within {max_terms} terms (last term max {last_term_max})"
    )]
    TruncationFailure {
        max_terms: usize,
        last_term_max: f64,
    },

    #[error(
        "Picard iteration did not converge in {max_iter} iterations (final metric {final_metric})"
    )]
    NonConvergence { max_iter: usize, final_metric: f64 },

    #[error("Gronwall hypothesis violated at {count} grid points (first at index {first})")]
    HypothesisViolated { count: usize, first: usize },

    #[error("undefined function value at index {index}")]
    UndefinedValue { index: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
