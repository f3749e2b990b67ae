use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: at least 2 is required")]
    InvalidDimension(usize),

    #[error("channel {channel} is out of range for a {qubits}-qubit register")]
    InvalidChannel { qubits: usize, channel: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A single integration step produced non-finite entries.
    #[error("non-finite state after integration step")]
    NonFinite,

    #[error("numerical failure in trajectory {trajectory} at step {step}")]
    NumericalFailure { trajectory: usize, step: usize },

    #[error("quadrature did not converge: estimated error {error:e} on value {value:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("impurity {target:e} is never crossed by the curve")]
    NoCrossing { target: f64 },

    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
