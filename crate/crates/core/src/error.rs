use thiserror::Error;

use crate::norms::NormOrder;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("validation error ({rule}): {detail}")]
    Validation { rule: String, detail: String },

    #[error("unknown builtin instance `{0}`")]
    UnknownInstance(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("simplex iteration limit reached after {pivots} pivots")]
    IterationLimit { pivots: usize },

    #[error("branch-and-bound node limit reached after {nodes} nodes")]
    NodeLimit { nodes: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("norm order {0} is not supported here; use ellipsoidal_outer_solve for L2")]
    UnsupportedNorm(NormOrder),

    #[error("invalid state: {0}")]
    State(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("enumeration too large: {count} schedules exceed the limit of {limit}")]
    Enumeration { count: usize, limit: usize },

    #[error("no convergence after {rounds} refinement rounds")]
    Convergence { rounds: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(rule: &str, detail: impl Into<String>) -> Self {
        Error::Validation {
            rule: rule.to_string(),
            detail: detail.into(),
        }
    }
}
