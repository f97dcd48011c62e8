//! Parameterized quantum statistical models and priors.

mod oscillator;
mod prior;
mod quadrature;
mod qubit;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::quantum_core::{DensityOperator, HermitianOperator};

pub use oscillator::{
    coherent_amplitudes, coherent_state, coherent_thermal_state, number_operator, phase_derivative, thermal_weights,
    CoherentPhaseModel, CoherentThermalModel, TRUNCATION_WARNING,
};
pub use prior::{prior_fisher, Prior, PriorFisher, GAMMA_TAIL_MASS};
pub use quadrature::{gauss_legendre, QuadratureSpec};
pub use qubit::{analytic_qubit_fisher, analytic_zqp, qubit_state, QubitPhaseModel};

/// A family `θ ↦ ρ(θ)` with its analytic derivative `dρ/dθ`.
pub trait ParameterizedModel: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;
    fn state(&self, theta: f64) -> DensityOperator;
    fn derivative(&self, theta: f64) -> HermitianOperator;
    fn descriptor(&self) -> ModelDescriptor;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelDescriptor {
    QubitPhase {
        eta: f64,
    },
    CoherentPhase {
        alpha: Complex64,
        dim: usize,
        truncated_weight: f64,
        truncation_warning: bool,
    },
    CoherentThermal {
        alpha: Complex64,
        mix: f64,
        mean_photon: f64,
        dim: usize,
        truncated_weight: f64,
        truncation_warning: bool,
    },
}
