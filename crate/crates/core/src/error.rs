use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max |A - A^T| = {deviation:e} exceeds {tolerance:e}")]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error("{0} contains non-finite entries")]
    NonFinite(&'static str),

    #[error("{method} did not converge within {sweeps} sweeps")]
    NoConvergence { method: &'static str, sweeps: usize },

    #[error("right-hand side is inconsistent: null-space component {null_norm:e} exceeds {threshold:e}")]
    Inconsistent { null_norm: f64, threshold: f64 },

    #[error("operation requires nonzero numerical rank")]
    ZeroRank,

    #[error("trace does not contain per-iteration vectors (record_trace was off)")]
    TraceNotRecorded,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
