use thiserror::Error;

use crate::pde_core::SolveReport;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum OafmError {
    #[error("invalid domain [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidDomain { a: f64, b: f64 },

    #[error("quadrature order must be at least 1")]
    InvalidOrder,

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("time level must be finite and non-negative, got {t}")]
    InvalidTime { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular matrix: pivot {pivot:e} in column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error(
        "Newton iteration did not converge: best residual {:e} after {} iterations",
        .best.residual_inf_norm,
        .best.iterations
    )]
    NoConvergence { best: Box<SolveReport> },

    #[error("problem `{0}` has no exact solution")]
    MissingExactSolution(String),

    #[error("convergence rate undefined: {0}")]
    RateDomain(String),

    #[error("at t = {t}: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<OafmError>,
    },
}

impl OafmError {
    /// Strips any `AtTime` annotations.
    pub fn root(&self) -> &OafmError {
        match self {
            OafmError::AtTime { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = OafmError> = std::result::Result<T, E>;
