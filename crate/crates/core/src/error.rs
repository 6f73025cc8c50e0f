use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid success profile: {0}")]
    InvalidProfile(String),

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("infeasible arrival rate: {0}")]
    InfeasibleRate(String),

    #[error("boundary estimation failed: {0}")]
    EstimationFailed(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
