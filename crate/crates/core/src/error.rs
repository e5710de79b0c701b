use thiserror::Error;

pub type Result<T, E = FunkError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FunkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("center not interior: |a| = {norm}")]
    CenterNotInterior { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("empty node set: {0}")]
    EmptyRegion(String),

    #[error("ill-conditioned fit: condition number {condition:.3e} ({rows} samples, {unknowns} unknowns)")]
    IllConditioned {
        condition: f64,
        rows: usize,
        unknowns: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("plane family mismatch at index {index}")]
    PlaneFamilyMismatch { index: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FunkError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        FunkError::InvalidArgument(msg.into())
    }
}
