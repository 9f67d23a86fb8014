use thiserror::Error;

/// Errors raised by scheme construction, spectral analysis and the quantum
/// Markov chain machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("construction error: {0}")]
    Construction(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("size limit exceeded: {what} = {count} exceeds cap {cap}")]
    Size { what: String, count: u128, cap: usize },

    #[error("axiom violation: {0}")]
    Axiom(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("numerical failure: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("Krein condition violated at (i,j,k) = ({i},{j},{k}): q = {value:e}")]
    KreinViolation {
        i: usize,
        j: usize,
        k: usize,
        value: f64,
    },

    #[error("inconsistent hypergroup: {0}")]
    Inconsistent(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("not stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("channel annihilated the state at step {step} (trace {trace:e})")]
    AbsorbedState { step: usize, trace: f64 },

    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical certificate (Krein positivity,
    /// complete positivity, spectral residuals) as opposed to bad input.
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::Numerical { .. }
                | Error::KreinViolation { .. }
                | Error::Inconsistent(_)
                | Error::NotCompletelyPositive { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
