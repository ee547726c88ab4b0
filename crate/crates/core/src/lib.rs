//! Numerical design of a heralded single-photon source built from coupled
//! microring resonators.
//!
//! The crate models the three-channel ring system through its steady-state
//! transfer functions, checks the coupling ratio that linearizes the transfer
//! phase, assembles the joint spectral amplitude of photon pairs generated by
//! spontaneous four-wave mixing and decomposes it to obtain the Schmidt
//! number and heralded-photon purity. The pump bandwidth can then be tuned to
//! minimize the Schmidt number.
//!
//! All routines are generic over [`Real`] (`f32` or `f64`); the generic types
//! default to `f64` and the `*32` aliases below name the single-precision
//! variants.

pub mod biphoton;
pub mod error;
pub mod optimize;
pub mod params;
pub mod scalar;
pub mod schmidt;
pub mod transfer;

pub use biphoton::{
    in_cavity_pump, jsa, jsa_from_sum_amplitude, jsa_with_options, jsi, jsi_correlation,
    pump_amplitude, pump_convolution, JsaGrid, JsaOptions, PumpConvolution,
};
pub use error::{Error, Result};
pub use optimize::{optimize_pump_width, sweep_ratio, OptimizationRecord, OptimizeOptions};
pub use params::{make_grid, validate_params, Channel, FrequencyGrid, PumpSpec, ResonatorParams};
pub use scalar::Real;
pub use schmidt::{
    converged_schmidt, schmidt_decompose, schmidt_number, ConvergenceReport, SchmidtResult,
};
pub use transfer::{
    delay_function, mode_transfer, optimal_coupling, phase_derivative_at_center, pump_transfer,
    trace, TransferTrace,
};

pub type ResonatorParams32 = ResonatorParams<f32>;
pub type FrequencyGrid32 = FrequencyGrid<f32>;
pub type PumpSpec32 = PumpSpec<f32>;
pub type JsaGrid32 = JsaGrid<f32>;
pub type SchmidtResult32 = SchmidtResult<f32>;
pub type TransferTrace32 = TransferTrace<f32>;
