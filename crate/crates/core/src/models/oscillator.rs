//! Phase-encoded harmonic-oscillator states in a truncated Fock space.

use num_complex::Complex64;

use super::{ModelDescriptor, ParameterizedModel};
use crate::error::{precondition, Result};
use crate::quantum_core::{ComplexMatrix, ComplexVector, DensityOperator, HermitianOperator, I};

/// Truncated weight above which a coherent state is flagged.
pub const TRUNCATION_WARNING: f64 = 0.1;

/// Number operator `diag(0, 1, …, d−1)`.
pub fn number_operator(d: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..d).map(|n| n as f64).collect();
    HermitianOperator::from_real_diagonal(&diag)
}

/// `i[n̂, ρ]`, the θ-derivative of `e^{iθn̂} ρ e^{−iθn̂}` at θ = 0.
pub fn phase_derivative(rho: &DensityOperator, n_op: &HermitianOperator) -> Result<HermitianOperator> {
    if rho.dim() != n_op.dim() {
        return Err(precondition(format!(
            "state dimension {} does not match generator dimension {}",
            rho.dim(),
            n_op.dim()
        )));
    }
    let (n, r) = (n_op.matrix(), rho.matrix());
    let comm = n * r - r * n;
    Ok(HermitianOperator::new_unchecked(comm * I))
}

/// Normalized amplitudes `c_n ∝ αⁿ/√(n!)`, `n < d`, and the weight lost to
/// truncation before renormalizing.
pub fn coherent_amplitudes(alpha: Complex64, d: usize) -> Result<(ComplexVector, f64)> {
    if d == 0 {
        return Err(precondition("Fock truncation must be at least 1"));
    }
    let mut c = Vec::with_capacity(d);
    let mut cur = Complex64::new(1.0, 0.0);
    for n in 0..d {
        if n > 0 {
            cur = cur * alpha / (n as f64).sqrt();
        }
        c.push(cur);
    }
    let v = ComplexVector::from_vec(c);
    let kept = v.norm_squared() * (-alpha.norm_sqr()).exp();
    Ok((v.normalize(), (1.0 - kept).max(0.0)))
}

/// Coherent state `|α⟩⟨α|` truncated to `d` levels and renormalized.
pub fn coherent_state(alpha: Complex64, d: usize) -> Result<DensityOperator> {
    let (v, _) = coherent_amplitudes(alpha, d)?;
    Ok(DensityOperator::new_unchecked(HermitianOperator::outer(&v)))
}

/// Renormalized thermal weights `n̄ⁿ/(1+n̄)^{n+1}` for `n < d`.
pub fn thermal_weights(mean_photon: f64, d: usize) -> Vec<f64> {
    let ratio = mean_photon / (1.0 + mean_photon);
    let mut w: Vec<f64> = (0..d).map(|n| ratio.powi(n as i32)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// `e^{iθn̂} ρ₀ e^{−iθn̂}` entrywise: `ρ_jk e^{iθ(j−k)}`.
fn rotate(rho0: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho0.nrows(), rho0.ncols(), |j, k| {
        rho0[(j, k)] * Complex64::from_polar(1.0, theta * (j as f64 - k as f64))
    })
}

fn rotate_derivative(rho0: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho0.nrows(), rho0.ncols(), |j, k| {
        let dn = j as f64 - k as f64;
        rho0[(j, k)] * Complex64::from_polar(dn, theta * dn) * I
    })
}

/// Pure coherent state acquiring a phase: `|φ(θ)⟩ = e^{in̂θ}|α⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentPhaseModel {
    alpha: Complex64,
    dim: usize,
    rho0: ComplexMatrix,
    truncated_weight: f64,
}

impl CoherentPhaseModel {
    pub fn new(alpha: Complex64, dim: usize) -> Result<Self> {
        let (v, truncated_weight) = coherent_amplitudes(alpha, dim)?;
        Ok(Self {
            alpha,
            dim,
            rho0: &v * v.adjoint(),
            truncated_weight,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }
}

impl ParameterizedModel for CoherentPhaseModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn state(&self, theta: f64) -> DensityOperator {
        DensityOperator::new_unchecked(HermitianOperator::new_unchecked(rotate(&self.rho0, theta)))
    }

    fn derivative(&self, theta: f64) -> HermitianOperator {
        HermitianOperator::new_unchecked(rotate_derivative(&self.rho0, theta))
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::CoherentPhase {
            alpha: self.alpha,
            dim: self.dim,
            truncated_weight: self.truncated_weight,
            truncation_warning: self.truncated_weight > TRUNCATION_WARNING,
        }
    }
}

/// Phase-rotated mixture `ε|α⟩⟨α| + (1 − ε)ρ_th`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentThermalModel {
    alpha: Complex64,
    mix: f64,
    mean_photon: f64,
    dim: usize,
    rho0: ComplexMatrix,
    truncated_weight: f64,
}

impl CoherentThermalModel {
    pub fn new(alpha: Complex64, mix: f64, mean_photon: f64, dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&mix) {
            return Err(precondition(format!("mixing constant must lie in [0, 1], got {mix}")));
        }
        if !mean_photon.is_finite() || mean_photon < 0.0 {
            return Err(precondition(format!(
                "mean photon number must be >= 0, got {mean_photon}"
            )));
        }
        let (v, truncated_weight) = coherent_amplitudes(alpha, dim)?;
        let thermal = thermal_weights(mean_photon, dim);
        let mut rho0 = (&v * v.adjoint()).scale(mix);
        for (n, w) in thermal.iter().enumerate() {
            rho0[(n, n)] += Complex64::new((1.0 - mix) * w, 0.0);
        }
        Ok(Self {
            alpha,
            mix,
            mean_photon,
            dim,
            rho0,
            truncated_weight,
        })
    }

    /// Thermal occupation tied to the coherent amplitude, `n̄ = |α|²`.
    pub fn with_matched_occupation(alpha: Complex64, mix: f64, dim: usize) -> Result<Self> {
        Self::new(alpha, mix, alpha.norm_sqr(), dim)
    }

    pub fn mix(&self) -> f64 {
        self.mix
    }

    pub fn mean_photon(&self) -> f64 {
        self.mean_photon
    }
}

impl ParameterizedModel for CoherentThermalModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn state(&self, theta: f64) -> DensityOperator {
        DensityOperator::new_unchecked(HermitianOperator::new_unchecked(rotate(&self.rho0, theta)))
    }

    fn derivative(&self, theta: f64) -> HermitianOperator {
        HermitianOperator::new_unchecked(rotate_derivative(&self.rho0, theta))
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor::CoherentThermal {
            alpha: self.alpha,
            mix: self.mix,
            mean_photon: self.mean_photon,
            dim: self.dim,
            truncated_weight: self.truncated_weight,
            truncation_warning: self.truncated_weight > TRUNCATION_WARNING,
        }
    }
}

/// `ϱ(θ)` for the coherent-plus-thermal model.
pub fn coherent_thermal_state(theta: f64, model: &CoherentThermalModel) -> DensityOperator {
    model.state(theta)
}
