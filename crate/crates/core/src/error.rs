use thiserror::Error;

/// Failure classes. Each maps onto a distinct CLI exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed call: dimension mismatch, out-of-domain parameter, bad flag.
    #[error("usage error: {0}")]
    Usage(String),

    /// Inputs are well formed but violate a relation's hypotheses.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Floating-point breakdown (non-finite value, Hermiticity drift).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Precondition(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
