use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator `{0}` is not Hermitian")]
    NonHermitian(&'static str),

    #[error("integration failed at t = {t:.6e} ps: {reason}")]
    Integration { t: f64, reason: String },

    #[error("steady state is not unique (null-space dimension {null_dim})")]
    SteadyStateSingular { null_dim: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("outside the domain of validity: {0}")]
    Domain(String),

    #[error("dressed basis is degenerate (η = 0)")]
    BasisDegenerate,

    #[error("pulse is under-resolved: step {step:.3e} ps exceeds {limit:.3e} ps")]
    StepResolution { step: f64, limit: f64 },

    #[error("unknown {kind} `{name}`; known: {known}")]
    UnknownName { kind: &'static str, name: String, known: String },
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
