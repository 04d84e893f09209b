use thiserror::Error;

/// Errors raised by the numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient is not finite at r = {r}")]
    NonFiniteCoefficient { r: f64 },

    #[error("adaptive step collapsed to {h:e} at r = {r} (coefficient singularity?)")]
    StepUnderflow { r: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at r = {r}")]
    MaxStepsExceeded { r: f64, max_steps: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid shell: {0}")]
    InvalidShell(String),

    #[error("mu = 0 has no middle branch; use the degenerate solution")]
    DegenerateMu,

    #[error("no second zero: mu = {mu} does not exceed the threshold {lambda}")]
    NoSecondZero { mu: f64, lambda: f64 },

    #[error("profile '{label}' is not defined on [{lo}, {hi}]")]
    DomainMismatch { label: String, lo: f64, hi: f64 },

    #[error("comparison solution vanished at r = {r}; shorten the window")]
    YVanished { r: f64 },

    #[error("comparison profile falls below the base profile at r = {r}")]
    ExceedanceViolated { r: f64 },

    #[error("window {window} too small to witness a crossing for t = {t} (total turn {total_turn})")]
    WindowTooSmall { t: f64, window: f64, total_turn: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {estimate:e})")]
    QuadratureNotConverged { lo: f64, hi: f64, estimate: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
