//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resm::metrology::CostFunction;
use resm::models::{CoherentThermalModel, ParameterizedModel, Prior, QuadratureSpec, QubitPhaseModel};
use resm::{random_povm, to_rank1, Povm, Rank1Povm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn povm(d: usize, n: usize, seed: u64) -> Povm {
    random_povm(d, n, &mut rng(seed)).expect("valid sizes")
}

pub fn rank1(d: usize, n: usize, seed: u64) -> Rank1Povm {
    to_rank1(&povm(d, n, seed)).expect("random POVMs refine")
}

/// Van Trees cost of the qubit experiment.
pub fn qubit_cost(eta: f64) -> Arc<CostFunction> {
    let m: Arc<dyn ParameterizedModel> = Arc::new(QubitPhaseModel::new(eta).expect("η in range"));
    Arc::new(CostFunction::van_trees(
        m,
        Prior::uniform_circle(),
        QuadratureSpec::default(),
    ))
}

/// Van Trees cost of the seven-level coherent plus thermal experiment.
pub fn oscillator_cost() -> Arc<CostFunction> {
    let m: Arc<dyn ParameterizedModel> =
        Arc::new(CoherentThermalModel::with_matched_occupation(Complex64::new(1.0, 0.0), 0.5, 7).expect("valid model"));
    Arc::new(CostFunction::van_trees(
        m,
        Prior::gamma(4.0, 1.5).expect("valid prior"),
        QuadratureSpec::default(),
    ))
}
