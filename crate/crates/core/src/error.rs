use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The kinematics are degenerate (e.g. purely longitudinal motion).
    #[error("singular configuration: {0}")]
    Singular(String),

    /// Quadrature did not converge under order doubling.
    #[error("quadrature accuracy: {0}")]
    Accuracy(String),

    /// Invariant drift of the classical integrator exceeded its bound.
    #[error("integration accuracy: {0}")]
    Integration(String),

    /// A Hermitian expectation value acquired an imaginary residue.
    #[error("non-real expectation value: imaginary part {0:e}")]
    ImaginaryResidue(f64),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
