use thiserror::Error;

/// Failures raised by the evaluators and constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition (malformed input).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The parameters lie outside the domain where the quantity is defined.
    #[error("domain violation: {0}")]
    Domain(String),
    /// A constraint set admits no function (e.g. the mass exceeds the envelope).
    #[error("infeasible constraint: {0}")]
    Infeasible(String),
    /// The parameter combination is not supported by this evaluator.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    /// Quadrature did not converge or a root bracket failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for the errors that mean "the inputs are outside the domain",
    /// as opposed to numerical trouble.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_) | Error::Domain(_) | Error::Infeasible(_) | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
