//! Phase-space ensemble simulation of quenched few-body oscillators.
//!
//! The crate is organised around four layers:
//!
//! * [`phase`] evolves ensembles of trajectories (ODE, SDE and discrete maps)
//!   and accumulates time-averaged histograms of observables.
//! * [`models`] holds the equations of motion: harmonic oscillator,
//!   semiclassical Lipkin-Meshkov-Glick (with dissipation and thermal noise),
//!   semiclassical Dicke model and the Chirikov standard map.
//! * [`quantum`] diagonalizes the spin Hamiltonian and computes infinite-time
//!   averaged distributions after a quench from `|S_z = 0>`.
//! * [`stats`] fits logarithmic divergences `P(v) ~ kappa * log|v| + c` and
//!   provides closed-form reference densities.
//!
//! All numerical kernels are generic over the scalar type through [`Real`];
//! the `*64` aliases below fix it to `f64`, which is what the experiment
//! runner uses.

// `!(a < b)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod models;
pub mod phase;
pub mod quantum;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PhasePoint64 = phase::PhasePoint<f64>;
pub type Ensemble64 = phase::Ensemble<f64>;
pub type StepScheme64 = phase::StepScheme<f64>;
pub type Observable64 = phase::Observable<f64>;
pub type ModelSpec64 = models::ModelSpec<f64>;
pub type LmgParams64 = models::LmgParams<f64>;
pub type DickeParams64 = models::DickeParams<f64>;
pub type InitialCondition64 = models::InitialCondition<f64>;
pub type SpinBasisMatrix64 = quantum::SpinBasisMatrix<f64>;
pub type SpectralDecomposition64 = quantum::SpectralDecomposition<f64>;

pub type PhasePoint32 = phase::PhasePoint<f32>;
pub type ModelSpec32 = models::ModelSpec<f32>;
pub type StepScheme32 = phase::StepScheme<f32>;
