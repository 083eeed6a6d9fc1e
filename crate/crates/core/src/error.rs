use thiserror::Error;

/// Errors raised by the operator-algebra routines and the inequality checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("eigenvalue {value} lies outside the domain {domain} of `{function}`")]
    Domain {
        function: String,
        value: f64,
        domain: String,
    },

    #[error("eigenvalue cluster near {eigenvalue} straddles interval endpoint {endpoint}")]
    BoundaryAmbiguity { eigenvalue: f64, endpoint: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("projections do not form a resolution of the identity: {0}")]
    Partition(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("function `{0}` is not convex on the working interval")]
    NotConvex(String),

    #[error("unknown function `{name}`; valid catalog entries: {valid}")]
    UnknownFunction { name: String, valid: String },

    #[error("matrix is not block diagonal for the algebra: {0}")]
    BlockMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
