use num_complex::Complex64;

use super::{ModelDescriptor, ParameterizedModel};
use crate::error::{precondition, Result};
use crate::quantum_core::{ComplexVector, DensityOperator, HermitianOperator};

fn qubit_ket(theta: f64, eta: f64) -> ComplexVector {
    let (c, s) = ((eta / 2.0).cos(), (eta / 2.0).sin());
    ComplexVector::from_vec(vec![
        Complex64::from_polar(c, -theta / 2.0),
        Complex64::from_polar(s, theta / 2.0),
    ])
}

/// `|ψ(θ, η)⟩⟨ψ(θ, η)|` with `ψ = (e^{−iθ/2} cos(η/2), e^{iθ/2} sin(η/2))`.
pub fn qubit_state(theta: f64, eta: f64) -> DensityOperator {
    DensityOperator::new_unchecked(HermitianOperator::outer(&qubit_ket(theta, eta)))
}

/// Qubit whose relative phase θ between the basis states is estimated; η sets
/// the superposition weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPhaseModel {
    eta: f64,
}

impl QubitPhaseModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&eta) {
            return Err(precondition(format!("eta must lie in [0, π], got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Quantum Fisher information `sin² η`, independent of θ.
    pub fn quantum_fisher(&self) -> f64 {
        self.eta.sin().powi(2)
    }
}

impl ParameterizedModel for QubitPhaseModel {
    fn dim(&self) -> usize {
        2
    }

    fn state(&self, theta: f64) -> DensityOperator {
        qubit_state(theta, self.eta)
    }

    fn derivative(&self, theta: f64) -> HermitianOperator {
        let psi = qubit_ket(theta, self.eta);
        let dpsi = ComplexVector::from_vec(vec![
            psi[0] * Complex64::new(0.0, -0.5),
            psi[1] * Complex64::new(0.0, 0.5),
        ]);
        let m = &dpsi * psi.adjoint() + &psi * dpsi.adjoint();
        HermitianOperator::new_unchecked(m)
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::QubitPhase { eta: self.eta }
    }
}

/// Fisher information of the two-outcome measurement `{ρ(ξ), I − ρ(ξ)}` on the
/// qubit state at θ: `sin²η / (1 + cos²η · tan²((ξ − θ)/2))`.
pub fn analytic_qubit_fisher(xi: f64, eta: f64, theta: f64) -> f64 {
    // Multiplying through by cos²((ξ−θ)/2) removes the pole of the tangent.
    let c2 = ((xi - theta) / 2.0).cos().powi(2);
    let s2 = 1.0 - c2;
    let sin2 = eta.sin().powi(2);
    let cos2 = eta.cos().powi(2);
    // At η = π/2 the value is sin²η for every ξ, including the pole where the
    // formula degenerates to 0/0; cos η of the rounded π/2 is ~6e-17.
    if cos2 < 1e-24 {
        return sin2;
    }
    sin2 * c2 / (c2 + cos2 * s2)
}

/// Van Trees information of the best two-outcome measurement of the ansatz
/// family under a uniform prior: `1 − |cos η|`.
pub fn analytic_zqp(eta: f64) -> f64 {
    1.0 - eta.cos().abs()
}
