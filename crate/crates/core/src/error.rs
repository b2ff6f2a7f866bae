use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    /// A value violated one of its documented invariants; the string names it.
    #[error("{0}")]
    Invariant(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("size refused: {what} (estimate {estimate}, cap {cap})")]
    SizeRefused { what: String, estimate: u128, cap: u128 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Size,
    Internal,
}

impl Error {
    pub fn invariant(name: impl Into<String>) -> Self {
        Error::Invariant(name.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::SizeRefused { .. } => ErrorKind::Size,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn refuse_if(what: &str, estimate: u128, cap: u128) -> Result<()> {
    if estimate > cap {
        Err(Error::SizeRefused { what: what.to_string(), estimate, cap })
    } else {
        Ok(())
    }
}
