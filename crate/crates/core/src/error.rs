use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("function is not monotone: value decreases by {drop:e} at node {index}")]
    NotMonotone { index: usize, drop: f64 },

    #[error("function is not eps-convex (eps = {eps}): second difference deficit {deficit:e} at node {index}")]
    NotEpsConvex { eps: f64, index: usize, deficit: f64 },

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("invalid cluster operation: {0}")]
    InvalidCluster(String),

    #[error("simulation exceeded {limit} merges; event loop is inconsistent")]
    EventOverflow { limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
