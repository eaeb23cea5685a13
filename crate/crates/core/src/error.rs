use thiserror::Error;

/// Failures raised by the solver, the certificate checks and the run pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("numeric overflow in {0}")]
    NumericOverflow(&'static str),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid dissipation: {0}")]
    InvalidDissipation(String),

    #[error("invalid load: {0}")]
    InvalidLoad(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("projection not converged (residual {residual:e})")]
    ProjectionNotConverged { residual: f64 },

    #[error("viscosity must be positive (got {0})")]
    NonPositiveViscosity(f64),

    #[error("time {t} outside horizon [0, {horizon}]")]
    TimeOutsideHorizon { t: f64, horizon: f64 },

    #[error("domain mismatch: [{a0}, {a1}] vs [{b0}, {b1}]")]
    DomainMismatch { a0: f64, a1: f64, b0: f64, b1: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("inner solver stalled at step {step} (residual {residual:e})")]
    InnerSolverStalled {
        step: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("line search failure at step {step}")]
    LineSearchFailure { step: usize },

    #[error("reparameterization failed: {0}")]
    ReparameterizationFailed(String),

    #[error("sweep not converged: {0}")]
    SweepNotConverged(String),

    #[error("characterization violated: {switches} switches on the fiber at t = {t}")]
    CharacterizationViolated { t: f64, switches: usize },

    #[error("degenerate rate in viscous regime at s = {s}")]
    DegenerateRate { s: f64 },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
