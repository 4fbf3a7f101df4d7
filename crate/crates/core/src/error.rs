use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("t = {t} lies outside the surface interval ({t_min}, {t_max})")]
    Domain { t: f64, t_min: f64, t_max: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("area integral diverges; area-based bounds do not apply")]
    InfiniteArea,

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("eigensolver breakdown: {0}")]
    Breakdown(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("report schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
