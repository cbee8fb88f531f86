use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates an axiom: algebra laws, simplicial identities,
    /// functoriality, module actions, malformed files.
    #[error("{0}")]
    Invalid(String),
    /// A request that the caller phrased wrongly (bad descriptor, bad bounds).
    #[error("{0}")]
    Usage(String),
    /// A request outside the range where the truncated computation is exact.
    #[error("{message} (achievable s_valid = {achievable})")]
    Range { message: String, achievable: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Error {
        Error::Usage(msg.into())
    }

    pub fn range(msg: impl Into<String>, achievable: usize) -> Error {
        Error::Range {
            message: msg.into(),
            achievable,
        }
    }

    /// True for errors caused by input that fails validation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid(_) | Error::Json(_) | Error::Dimension { .. })
    }
}
