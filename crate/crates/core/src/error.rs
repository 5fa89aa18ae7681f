use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("invalid object: {0}")]
    Invalid(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} (limit {limit}, reached {reached})")]
    Budget {
        what: String,
        limit: usize,
        reached: usize,
    },

    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, limit: usize, reached: usize) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
            reached,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
