use thiserror::Error;

/// Errors produced by the resonator model and the purity pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rate `{name}` must be positive, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("pump variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("invalid frequency grid: {0}")]
    BadGridSpec(String),

    #[error("phase derivative order {0} is not supported (expected 2..=5)")]
    UnsupportedOrder(usize),

    #[error("pump carrier mismatch: 2*omega0_p - omega0_i - omega0_s = {offset}")]
    CarrierMismatch { offset: f64 },

    #[error("joint spectral amplitude is identically zero")]
    DegenerateKernel,

    #[error("Schmidt coefficients are not normalized (sum = {0})")]
    NotNormalized(f64),

    #[error(
        "Schmidt number not converged at resolution {resolution}: K = {schmidt_number}, \
         estimated error {achieved_error}"
    )]
    NoConvergence {
        schmidt_number: f64,
        achieved_error: f64,
        resolution: usize,
    },

    #[error(
        "minimum not bracketed: K at the {} endpoint (sigma = {sigma}, K = {schmidt_number}) \
         is below every interior probe",
        if *.at_upper { "upper" } else { "lower" }
    )]
    BadBracket {
        at_upper: bool,
        sigma: f64,
        schmidt_number: f64,
    },

    #[error("singular value decomposition failed: {0}")]
    Decomposition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
