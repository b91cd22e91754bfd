use thiserror::Error;

use crate::optimizer::FeasibleInterval;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The power allocation problem has no feasible point.
    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        intervals: Vec<FeasibleInterval>,
    },

    /// A closed form produced a point that fails its own feasibility check.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
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

    pub(crate) fn infeasible(reason: impl Into<String>, intervals: Vec<FeasibleInterval>) -> Self {
        Error::Infeasible {
            reason: reason.into(),
            intervals,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}
