use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// The variants map one-to-one onto the command-line exit codes: invalid input (2),
/// exceeded resource limits (3) and broken theorem consistency (4).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} exceeds the configured limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("consistency violation: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
