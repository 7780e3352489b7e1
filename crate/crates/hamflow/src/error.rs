use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Structure {
        what: &'static str,
        residual: f64,
        tol: f64,
    },
    #[error("rank deficient input: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("span is not Lagrangian: isotropy residual {residual:.3e} exceeds {tol:.3e}")]
    NotLagrangian { residual: f64, tol: f64 },
    #[error("refinement exhausted on [{lo}, {hi}]: {reason}")]
    RefinementExhausted { lo: f64, hi: f64, reason: String },
    #[error("operator not invertible at endpoint lambda = {lambda}: smallest |eigenvalue| {value:.3e}")]
    EndpointKernel { lambda: f64, value: f64 },
    #[error("matrix not hyperbolic: min |Re mu| = {margin:.3e}")]
    NotHyperbolic { margin: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("truncation not converged: gap {gap:.3e} between T and 1.5T exceeds {tol:.3e}")]
    Truncation { gap: f64, tol: f64 },
    #[error("graph representation unsolvable at lambda = {0}")]
    GraphUnsolvable(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
