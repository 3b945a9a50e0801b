//! Error type shared across the library.

use std::path::PathBuf;

/// Everything that can go wrong while loading data, validating it, or
/// running the optimization and simulation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file could not be read or written.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record in an input file could not be parsed. `row` is 1-based and
    /// counts data rows (the header is row 0).
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Input data parsed but violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A configuration file or parameter set is unusable.
    #[error("config error: {0}")]
    Config(String),

    /// A numeric argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds a configured resource limit.
    #[error("size error: {0}")]
    Size(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(row: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    pub fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn size(message: impl Into<String>) -> Self {
        Error::Size(message.into())
    }
}
