use thiserror::Error;

/// Failures raised by the special-function kernel, the solvers and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("|z| = {modulus} is below the asymptotic radius {min_radius}")]
    AsymptoticDomain { modulus: f64, min_radius: f64 },

    #[error("propagator normalization |gamma| = {magnitude} is too small")]
    SingularNormalization { magnitude: f64 },

    #[error("amplitude would leave the truncated space (n_max = {n_max})")]
    TruncationOverflow { n_max: usize },

    #[error("norm drifted by {drift:e}")]
    NormDrift { drift: f64 },

    #[error("step size underflow at tau = {tau} (h = {step:e})")]
    StepUnderflow { tau: f64, step: f64 },

    #[error("integrator exceeded {steps} steps")]
    MaxSteps { steps: usize },

    #[error("state is in the {found} frame, expected {expected}")]
    FrameMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("truncation still too small at n_max = {n_max} (top-sector population {population:e})")]
    TruncationEscalation { n_max: usize, population: f64 },

    #[error("oracle did not converge: step doubling changed amplitudes by {change:e}")]
    OracleNotConverged { change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
