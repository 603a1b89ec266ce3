use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid window: m = {window} for a series of length {len}")]
    InvalidWindow { window: usize, len: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate window: constant values have no defined correlation")]
    DegenerateWindow,

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error(
        "insufficient length: {positions} window positions cannot give every position a neighbor \
         outside an exclusion radius of {exclusion}"
    )]
    InsufficientLength { positions: usize, exclusion: usize },

    #[error("metric mismatch: channel `{channel}` is continuous and cannot use the Hamming metric")]
    MetricMismatch { channel: String },

    #[error("parse error at line {line}, column `{column}`: {message}")]
    Parse { line: u64, column: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("spec error: {0}")]
    Spec(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage/validation, 2 data, 3 internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidWindow { .. }
            | Error::InvalidInput(_)
            | Error::DegenerateWindow
            | Error::ContractViolation(_)
            | Error::InsufficientLength { .. }
            | Error::MetricMismatch { .. }
            | Error::Spec(_)
            | Error::Usage(_) => 1,
            Error::InvalidData(_) | Error::Parse { .. } | Error::Schema(_) | Error::Io { .. } => 2,
            Error::Inconsistency(_) => 3,
        }
    }
}
