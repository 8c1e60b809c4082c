use thiserror::Error;

/// Errors produced by circuit construction, simulation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A document could not be parsed or failed invariant checks on load.
    #[error("parse error: {0}")]
    Parse(String),

    /// A register size exceeded what the exact backends can handle.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
