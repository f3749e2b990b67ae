//! Integration of the measured evolution
//! `dρ = 2γ·D[X]ρ·dt + √(2γ)·H[X]ρ·dW` for one or more channels, with
//! `D[A]ρ = AρA† − ½{A†A, ρ}` and `H[A]ρ = Aρ + ρA† − tr((A + A†)ρ)·ρ`.
//!
//! Records are `dR = √(8γ)·⟨X⟩·dt + dW`, the normalization under which the
//! integrated record `R` enters the closed-form solution as
//! `exp(2√(2γ)·X·R)`.

mod config;
mod linear;
mod noise;
mod record;
mod step;

pub use config::{uniform_grid, SimConfig, System, COARSE_STEP_WARNING, DEFAULT_DT_SCALE};
pub use linear::{
    exact_impurity_sample, exact_record_sampler, linear_solution, linear_state,
    register_exact_sampler, register_weighted_mean_impurity, weighted_mean_impurity, ExactSample,
};
pub(crate) use linear::normalized_weights;
pub use noise::{NoiseSource, WienerNoise, WienerStream, PERMUTATION_CHANNEL};
pub use record::MeasurementRecord;
pub use step::{expectation, sme_step, sme_step_with_increments, StepOutput, ROUNDOFF_EIGENVALUE};
