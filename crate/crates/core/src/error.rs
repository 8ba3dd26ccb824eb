use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed fraction `{0}`")]
    MalformedFraction(String),

    #[error("coefficient {0} lies outside [0, 1]")]
    CoefficientOutOfRange(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),

    #[error("coefficient vector does not match the graph: {0}")]
    IdMismatch(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("lattice is not negative definite: {0}")]
    NotNegativeDefinite(String),

    #[error("unsupported shape: {0}")]
    Unsupported(String),

    /// A precondition of a construction failed. `stage` names the step.
    #[error("{stage}: {detail}")]
    Hypothesis { stage: &'static str, detail: String },
}

impl Error {
    pub(crate) fn hypothesis(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            stage,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
