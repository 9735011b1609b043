use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("object index {index} is not in 1..={n}")]
    InvalidObject { index: usize, n: usize },

    #[error("rank {k} is out of bounds for a subset of size {size}")]
    RankOutOfBounds { k: usize, size: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("restriction error: {0}")]
    Restriction(String),

    #[error("size mismatch: expected {expected} agents/objects, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("mechanism is undefined at profile {0}")]
    Undefined(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
