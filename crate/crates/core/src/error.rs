use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),

    #[error("{what} ({actual}) exceeds the supported limit of {limit}")]
    SizeLimit {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("revenue ratio must lie in (0, 1], got {0}")]
    InvalidRatio(f64),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("unknown solver {0:?}")]
    UnknownSolver(String),

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
