use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use resm::models::{
    analytic_qubit_fisher, CoherentPhaseModel, CoherentThermalModel, ParameterizedModel, Prior, QuadratureSpec,
    QubitPhaseModel,
};
use resm::quantum_core::max_abs;
use resm::{fisher_information, Povm};

fn models() -> Vec<Box<dyn ParameterizedModel>> {
    vec![
        Box::new(QubitPhaseModel::new(0.0).unwrap()),
        Box::new(QubitPhaseModel::new(1.1).unwrap()),
        Box::new(QubitPhaseModel::new(PI).unwrap()),
        Box::new(CoherentPhaseModel::new(Complex64::new(1.0, 0.0), 7).unwrap()),
        Box::new(CoherentPhaseModel::new(Complex64::new(0.9, -0.8), 7).unwrap()),
        Box::new(CoherentThermalModel::with_matched_occupation(Complex64::new(1.0, 0.0), 0.5, 7).unwrap()),
        Box::new(CoherentThermalModel::new(Complex64::new(0.5, 0.5), 0.2, 2.0, 6).unwrap()),
    ]
}

#[test]
fn derivatives_match_central_differences() {
    let h = 1e-5;
    for m in models() {
        for k in 0..32 {
            let theta = TAU * k as f64 / 32.0;
            let fd = (m.state(theta + h).matrix() - m.state(theta - h).matrix()) / Complex64::new(2.0 * h, 0.0);
            let err = max_abs(&(fd - m.derivative(theta).matrix()));
            assert!(err < 1e-6, "{:?} at {theta}: {err:e}", m.descriptor());
        }
    }
}

#[test]
fn states_are_valid_on_a_grid() {
    for m in models() {
        for k in 0..32 {
            let theta = TAU * k as f64 / 32.0;
            let rho = m.state(theta);
            assert!((rho.as_hermitian().trace() - 1.0).abs() < 1e-9);
            assert!(rho.as_hermitian().min_eigenvalue().unwrap() > -1e-9);
        }
    }
}

#[test]
fn two_outcome_fisher_matches_closed_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let xi = rng.random_range(0.0..TAU);
        let eta = rng.random_range(0.0..PI);
        let theta = rng.random_range(0.0..TAU);
        let rho = resm::models::qubit_state(xi, eta).as_hermitian().clone();
        let p = Povm::new(vec![rho.clone(), resm::HermitianOperator::identity(2).sub(&rho)]).unwrap();
        let got = fisher_information(&p, std::sync::Arc::new(QubitPhaseModel::new(eta).unwrap()), theta).unwrap();
        assert!((got - analytic_qubit_fisher(xi, eta, theta)).abs() < 1e-8);
    }
}

#[test]
fn priors_integrate_to_one() {
    let q = QuadratureSpec::default();
    for prior in [
        Prior::uniform_circle(),
        Prior::phase_gaussian(),
        Prior::gamma(4.0, 1.5).unwrap(),
    ] {
        let total: f64 = prior.weighted_nodes(&q).iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-6, "{prior:?}: {total}");
    }
}
