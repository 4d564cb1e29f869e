use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("singular system: {0}")]
    Singular(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("degenerate precoder: column {column} is zero but has a nonzero power budget")]
    DegeneratePrecoder { column: usize },

    #[error("degenerate SINR target for user {user}: effective channel gain is zero")]
    DegenerateTarget { user: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
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
