//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violated a structural precondition (bad sizes, bad probabilities, malformed data).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A quantity the caller asked for does not exist for this input
    /// (e.g. tau when no units respond to assignment).
    #[error("undefined quantity: {0}")]
    Undefined(String),

    /// Exact enumeration would exceed the configured cap.
    #[error("enumeration of {combinations} assignments exceeds cap {cap}")]
    EnumerationCap { combinations: u128, cap: u128 },

    /// File parse failure with location.
    #[error("parse error at {path}:{row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }
}
