use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Numerical failures carry the `module::operation` that raised them so the
/// runner can report where a computation broke down.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: order {order} exceeds supported maximum {max}")]
    OrderTooLarge {
        func: &'static str,
        order: f64,
        max: f64,
    },

    #[error("stability constant {value} must be below n-1 = {limit}")]
    StabilityViolation { value: f64, limit: f64 },

    #[error("{op}: integration failure ({detail})")]
    IntegrationFailure { op: &'static str, detail: String },

    #[error("{op}: resonance, |W| = {wronskian:e}")]
    Resonance { op: &'static str, wronskian: f64 },

    #[error("{op}: mode sum not converged ({detail})")]
    Truncation { op: &'static str, detail: String },

    #[error("{op}: quadrature resolution insufficient ({detail})")]
    Resolution { op: &'static str, detail: String },

    #[error("(q, r) = ({q}, {r}) is not Schrödinger admissible in dimension {n}")]
    Inadmissible { q: f64, r: f64, n: usize },

    #[error("index sets: {0}")]
    IndexSet(String),

    #[error("composition undefined: Re(E_rb + F_lb) = {0} is not positive")]
    CompositionUndefined(f64),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IntegrationFailure { .. }
                | Error::Resonance { .. }
                | Error::Truncation { .. }
                | Error::Resolution { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
