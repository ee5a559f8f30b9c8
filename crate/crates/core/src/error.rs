use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convexity error: {0}")]
    Convexity(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("curvature range error: {0}")]
    CurvatureRange(String),
    #[error("rigid linkage: {0}")]
    Rigidity(String),
    #[error("trajectory blow-up: {0}")]
    BlowUp(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
