use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("{what} = {value} is out of range; valid range is {range}")]
    Domain {
        what: &'static str,
        value: usize,
        range: String,
    },

    /// The caller violated a precondition (empty input, mismatched lengths, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid parameters or an unknown identifier.
    #[error("configuration error: {0}")]
    Config(String),

    /// Persisted data is malformed or inconsistent.
    #[error("data error: {0}")]
    Data(String),

    #[error("I/O error at {}: {source}", path.display())]
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
}
