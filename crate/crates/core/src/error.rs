use thiserror::Error;

use crate::integrate::IntegrationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain where the model is defined.
    #[error("domain error in `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    /// The inverse design needs a non-zero coupling to solve for `f(t)`.
    #[error("inverse design undefined: coupling eta is zero")]
    ZeroCoupling,

    #[error("unit error: {0}")]
    Unit(String),

    #[error(transparent)]
    Integration(#[from] IntegrationError),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }
}
