use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("sample from domain A carries no specification")]
    SpecMissing,
    #[error("empty batch: {0}")]
    EmptyBatch(&'static str),
    #[error("empty dataset for domain {0}")]
    EmptyDataset(&'static str),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid probability table: {0}")]
    InvalidPmf(String),
    #[error("axis count: {0}")]
    AxisCount(String),
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("function class too large: {0}")]
    ClassTooLarge(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite loss at step {step}: {what}")]
    NonFiniteLoss { step: u64, what: String },
    #[error("checkpoint does not match configuration: {0}")]
    CheckpointMismatch(String),
    #[error("operation needs an image-family world")]
    NotImageWorld,
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
