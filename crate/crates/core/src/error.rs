use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = TrxError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TrxError {
    /// A value violates a documented invariant or precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The data cannot support the requested statistic, e.g. a single-class
    /// tuning set.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rle decode error at pair {pair}: {reason}")]
    Rle { pair: usize, reason: String },

    /// A file in an outputs directory could not be parsed or validated.
    #[error("study {study}, file {file}: {reason}")]
    Format {
        study: String,
        file: String,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl TrxError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TrxError::Invalid(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        TrxError::Degenerate(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TrxError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by data that is well-formed but statistically
    /// unusable.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, TrxError::Degenerate(_))
    }
}
