use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value violates a documented precondition.
    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },

    /// A numerical procedure failed (singular matrix, non-convergence, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            reason: reason.into(),
        }
    }

    /// True for input validation failures, false for numerical or i/o failures.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid { .. } | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
