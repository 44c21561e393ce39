use alloc::string::String;

/// Errors raised by the channel models.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A Green's function was evaluated at zero separation.
    #[error("singular evaluation: {0}")]
    Singularity(&'static str),
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Matrix or sample-count mismatch.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Bounce scatterers cannot be placed for the given delay and angles.
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
    /// A numerical routine did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A channel generator failed inside an ensemble.
    #[error("realization {index}: {source}")]
    Realization {
        index: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
