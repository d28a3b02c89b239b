use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the pipeline can report.
///
/// Each variant has a stable kebab-case [`name`](Error::name) and a small
/// integer [`code`](Error::code). The CLI uses the code as its exit status
/// and the C API returns it directly, so neither may change once published.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image data: {0}")]
    CorruptImage(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("index {index} out of range for {len} bins")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("amplitude vector is not normalized (squared norm {0})")]
    NormViolation(f64),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("mse must be non-negative, got {0}")]
    NegativeMse(f64),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("malformed data file: {0}")]
    Malformed(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::FileNotFound(_) => "file-not-found",
            Error::UnsupportedFormat(_) => "unsupported-format",
            Error::CorruptImage(_) => "corrupt-image-data",
            Error::Io(_) => "io-failure",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::EmptyInput(_) => "empty-input",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::NormViolation(_) => "norm-violation",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::NegativeMse(_) => "negative-mse",
            Error::ZeroShots => "zero-shots",
            Error::Malformed(_) => "malformed-data",
        }
    }

    /// Stable numeric code. 0 is success, 1 is reserved for unclassified
    /// failures and 2 for command-line usage errors.
    pub fn code(&self) -> i32 {
        match self {
            Error::FileNotFound(_) => 3,
            Error::UnsupportedFormat(_) => 4,
            Error::CorruptImage(_) => 5,
            Error::Io(_) => 6,
            Error::InvalidParameter(_) => 7,
            Error::DimensionMismatch(_) => 8,
            Error::EmptyInput(_) => 9,
            Error::IndexOutOfRange { .. } => 10,
            Error::NormViolation(_) => 11,
            Error::InvalidDistribution(_) => 12,
            Error::NegativeMse(_) => 13,
            Error::ZeroShots => 14,
            Error::Malformed(_) => 15,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
