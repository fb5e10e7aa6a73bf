use thiserror::Error;

/// Errors raised by the simulator, datasets, and training engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("numerical failure: non-finite loss at parameter index {index}")]
    NumericalFailure { index: usize },

    #[error("format error: {0}")]
    FormatError(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
