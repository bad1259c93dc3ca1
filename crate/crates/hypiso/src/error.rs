use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Floating point breakdown, e.g. an interior point rounded onto the sphere.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The volume beyond the truncation radius is too large to extrapolate reliably.
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("chart error: {0}")]
    Chart(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn conditioning(msg: impl Into<String>) -> Self {
        Error::Conditioning(msg.into())
    }
}
