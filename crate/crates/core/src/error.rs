use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("{0}")]
    Domain(String),

    /// An iterative routine failed to converge. Indicates a bug.
    #[error("internal error: {0}")]
    Convergence(String),

    /// Exact enumeration was requested for too many variables.
    #[error("dimension {n} exceeds the exact-enumeration limit of {max}")]
    Dimension { n: usize, max: usize },

    /// The moment constraints admit no distribution on the support.
    #[error("moment constraints are infeasible on the support grid")]
    Infeasible,

    /// Malformed input data (matrix or vector files).
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
