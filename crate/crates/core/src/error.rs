use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid string: {0}")]
    Invalid(String),

    #[error("no arrow with index {0}")]
    NoSuchArrow(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{what} exceeds the limit {limit}")]
    LimitExceeded { what: String, limit: usize },
}

impl Error {
    /// True for failures caused by a size or budget limit rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
