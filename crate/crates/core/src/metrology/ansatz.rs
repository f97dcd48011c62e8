use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{CostFunction, CostValue};
use crate::error::{precondition, Result};
use crate::models::{coherent_state, qubit_state};
use crate::povm::Povm;
use crate::quantum_core::{DensityOperator, HermitianOperator};

pub const DEFAULT_XI_GRID: usize = 256;
/// Relative gap below which two scan values count as equal. Quadrature noise
/// near outcome-probability zeros is of order 1e-10.
pub const XI_TIE_TOL: f64 = 1e-8;

type Generator = dyn Fn(f64) -> DensityOperator + Send + Sync;

/// Two-outcome measurements `{ρ(ξ), I − ρ(ξ)}` built from a family of pure
/// states.
pub struct AnsatzFamily {
    dim: usize,
    generator: Box<Generator>,
}

impl std::fmt::Debug for AnsatzFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnsatzFamily").field("dim", &self.dim).finish()
    }
}

impl AnsatzFamily {
    pub fn new(dim: usize, generator: impl Fn(f64) -> DensityOperator + Send + Sync + 'static) -> Self {
        Self {
            dim,
            generator: Box::new(generator),
        }
    }

    /// `ρ(ξ) = |ψ(ξ, η)⟩⟨ψ(ξ, η)|`.
    pub fn qubit(eta: f64) -> Self {
        Self::new(2, move |xi| qubit_state(xi, eta))
    }

    /// `ρ(ξ) = |e^{iξ}α⟩⟨e^{iξ}α|` in `dim` Fock levels.
    pub fn coherent(alpha: Complex64, dim: usize) -> Result<Self> {
        coherent_state(alpha, dim)?;
        Ok(Self::new(dim, move |xi| {
            coherent_state(alpha * Complex64::from_polar(1.0, xi), dim).expect("dim checked above")
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn povm(&self, xi: f64) -> Povm {
        let rho = (self.generator)(xi).as_hermitian().clone();
        let rest = HermitianOperator::identity(self.dim).sub(&rho);
        Povm::new_unchecked(self.dim, vec![rho, rest])
    }
}

/// `n` uniformly spaced points on `[0, 2π)`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnsatzOptimum {
    pub xi: f64,
    pub cost: CostValue,
}

/// Best member of the family on `grid`; near-ties go to the smallest ξ.
pub fn ansatz_scan(family: &AnsatzFamily, cost: &CostFunction, grid: &[f64]) -> Result<AnsatzOptimum> {
    if grid.is_empty() {
        return Err(precondition("ansatz grid is empty"));
    }
    let mut best: Option<AnsatzOptimum> = None;
    for &xi in grid {
        let c = cost.evaluate(&family.povm(xi))?;
        best = Some(match best {
            None => AnsatzOptimum { xi, cost: c },
            Some(b) => {
                let tie = XI_TIE_TOL * b.cost.value.abs().max(1.0);
                if c.value > b.cost.value + tie || ((c.value - b.cost.value).abs() <= tie && xi < b.xi) {
                    AnsatzOptimum { xi, cost: c }
                } else {
                    b
                }
            }
        });
    }
    Ok(best.expect("grid is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        analytic_qubit_fisher, analytic_zqp, CoherentPhaseModel, ParameterizedModel, Prior, QuadratureSpec,
        QubitPhaseModel,
    };
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use std::sync::Arc;

    fn uniform_cost(eta: f64) -> CostFunction {
        CostFunction::van_trees(
            Arc::new(QubitPhaseModel::new(eta).unwrap()),
            Prior::uniform_circle(),
            QuadratureSpec::default(),
        )
    }

    #[test]
    fn ansatz_elements_complete() {
        let fam = AnsatzFamily::coherent(Complex64::new(0.7, 0.0), 6).unwrap();
        let p = fam.povm(1.3);
        assert!(p.completeness_residual() < 1e-15);
        assert!(p.validate().passed());
    }

    #[test]
    fn uniform_superposition_is_flat() {
        let grid = uniform_grid(DEFAULT_XI_GRID);
        let best = ansatz_scan(&AnsatzFamily::qubit(FRAC_PI_2), &uniform_cost(FRAC_PI_2), &grid).unwrap();
        assert!((best.cost.value - 1.0).abs() < 1e-8);
        assert_eq!(best.xi, 0.0);
    }

    #[test]
    fn quarter_angle_matches_closed_form() {
        let grid = uniform_grid(DEFAULT_XI_GRID);
        let best = ansatz_scan(&AnsatzFamily::qubit(FRAC_PI_4), &uniform_cost(FRAC_PI_4), &grid).unwrap();
        assert!(
            (best.cost.value - analytic_zqp(FRAC_PI_4)).abs() < 1e-4,
            "{}",
            best.cost.value
        );
        assert!((analytic_zqp(FRAC_PI_4) - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn qubit_ansatz_fisher_is_analytic() {
        let eta = 1.1;
        let model: Arc<dyn ParameterizedModel> = Arc::new(QubitPhaseModel::new(eta).unwrap());
        let fam = AnsatzFamily::qubit(eta);
        for (xi, theta) in [(0.2, 1.5), (3.0, 0.1), (5.0, 5.5)] {
            let cost = CostFunction::fisher_at(model.clone(), theta);
            let got = cost.evaluate(&fam.povm(xi)).unwrap().value;
            assert!((got - analytic_qubit_fisher(xi, eta, theta)).abs() < 1e-8);
        }
    }

    #[test]
    fn coherent_scan_recomputes() {
        let alpha = Complex64::new(1.0, 0.0);
        let model = Arc::new(CoherentPhaseModel::new(alpha, 7).unwrap());
        let cost = CostFunction::fisher_at(model, PI / 3.0);
        let fam = AnsatzFamily::coherent(alpha, 7).unwrap();
        let best = ansatz_scan(&fam, &cost, &uniform_grid(64)).unwrap();
        assert!(best.cost.value.is_finite() && best.cost.value > 0.0);
        let again = cost.evaluate(&fam.povm(best.xi)).unwrap();
        assert_eq!(again.value, best.cost.value);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(ansatz_scan(&AnsatzFamily::qubit(1.0), &uniform_cost(1.0), &[]).is_err());
    }
}
