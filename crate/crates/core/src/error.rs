use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// Request exceeds a fixed exhaustive-scan or enumeration bound.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Mathematically undefined value, e.g. the surprisal of an impossible event.
    #[error("domain error: {0}")]
    Domain(String),
    /// A history log does not match the configuration it is applied to.
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    /// Process exit code used by the command line.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain(_) => 2,
            Error::Capacity(_) => 3,
            Error::Integrity(_) | Error::Io(_) => 1,
        }
    }
}
