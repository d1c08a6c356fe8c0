use thiserror::Error;

/// Errors raised by matrix construction, decompositions, bounds, sampling
/// and the structure tests.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e} exceeds tolerance {tol:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        gap: f64,
        tol: f64,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("dimension {requested} exceeds the configured cap {cap}")]
    SizeLimit { requested: usize, cap: usize },

    #[error("eigendecomposition did not converge after {iterations} iterations")]
    DecompositionFailed { iterations: usize },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e} <= {eps:e}")]
    NotPositiveDefinite { eigenvalue: f64, eps: f64 },

    #[error("sparse class is infeasible: {0}")]
    InfeasibleClass(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("distribution lacks required moments: {0}")]
    InsufficientMoments(String),

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
