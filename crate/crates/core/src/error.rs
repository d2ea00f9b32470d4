use std::path::PathBuf;

/// Errors raised by the estimators, generators and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("insufficient neighbors for {query}: {available} available, {required} required")]
    InsufficientNeighbors {
        query: String,
        available: usize,
        required: usize,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("value out of representable range: {0}")]
    Range(String),

    #[error("fixed-point iteration did not converge: {0}")]
    Divergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn insufficient(query: impl ToString, available: usize, required: usize) -> Self {
        Error::InsufficientNeighbors {
            query: query.to_string(),
            available,
            required,
        }
    }
}
