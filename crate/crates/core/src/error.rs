use thiserror::Error;

/// Errors raised by the numerical kernels and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("Re λ = {re} is outside the domain: {reason}")]
    Domain { re: f64, reason: &'static str },

    #[error("λ = {re}{im:+}i lies outside the continuation strip Re λ > -{a}")]
    OutOfStrip { re: f64, im: f64, a: f64 },

    #[error("W has no positive eigenvalue (μ_max = {0})")]
    NoPositiveEigenvalue(f64),

    #[error("Newton iteration did not converge after {iterations} steps (last λ = {re}{im:+}i, |residual| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        re: f64,
        im: f64,
        residual: f64,
    },

    #[error("quadrature failed: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("unsupported eigenfunction shape: {0}")]
    Unsupported(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("integration diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    #[error("bifurcation fit failed: {0}")]
    Fit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
