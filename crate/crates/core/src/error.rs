use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Instance text could not be parsed.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The brute-force oracle refuses instances above its size limit.
    #[error("instance has {n} jobs, brute force is limited to {limit}")]
    TooLarge { n: usize, limit: usize },

    /// Something outside the process is missing or broken (solver binary, filesystem).
    #[error("environment error: {0}")]
    Environment(String),

    /// An external solver produced output we could not interpret.
    #[error("solver protocol error: {message}\n--- raw output ---\n{raw}")]
    Protocol { message: String, raw: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
