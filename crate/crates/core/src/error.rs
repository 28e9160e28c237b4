use thiserror::Error;

/// Errors raised by coefficient evaluation, state construction and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation is only defined for a narrower class of devices
    /// (e.g. the small-drive expansion needs symmetric junctions).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    /// The integrator left the set of physical states.
    #[error("integration failure{} at t = {time} ns: {reason}", phase.as_ref().map(|p| format!(" in phase '{p}'")).unwrap_or_default())]
    Integration {
        time: f64,
        reason: String,
        phase: Option<String>,
    },

    /// Raising the Fock truncation changed observables by more than the
    /// acceptance threshold.
    #[error("fock truncation not converged: observables changed by {change:e} going from {from} to {to} levels")]
    NotConverged { from: usize, to: usize, change: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach a protocol phase label to an integration failure.
    pub fn in_phase(self, name: &str) -> Self {
        match self {
            Error::Integration { time, reason, .. } => Error::Integration {
                time,
                reason,
                phase: Some(name.to_string()),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
