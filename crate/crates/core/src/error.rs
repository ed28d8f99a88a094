use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Order is not finite or hits a pole of the Gamma function.
    #[error("invalid order {value}: {reason}")]
    Domain { value: f64, reason: String },

    /// Caller supplied inputs that violate an operation's preconditions.
    #[error("usage: {0}")]
    Usage(String),

    /// Input could not be parsed into a sequence or matrix description.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
