use thiserror::Error;

/// Errors raised by the model, integrator and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the relation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The square-root Lagrangian radicand went negative.
    #[error(
        "lagrangian radicand is negative ({radicand:e}); state lies outside the model's validity"
    )]
    NegativeRadicand { radicand: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The first integral drifted beyond the divergence threshold.
    #[error("integration diverged at t = {t:e}: invariant drift {drift:e}")]
    Divergence { t: f64, drift: f64 },

    #[error("inerton {0} is not active")]
    InactiveInerton(usize),

    #[error("unknown check `{name}`; registered checks: {registry}")]
    UnknownCheck { name: String, registry: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
