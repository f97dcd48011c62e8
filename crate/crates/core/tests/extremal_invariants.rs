use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resm::extremal::{build_constraints, extract_step, solve_vertex};
use resm::quantum_core::tol;
use resm::{decompose, gell_mann_basis, random_povm, to_rank1};

/// Every basic feasible solution of `A x = b, x ≥ 0`, by trying all column
/// subsets of size `rank(A)`.
fn enumerate_vertices(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<Vec<f64>> {
    let n = a.ncols();
    let rank = a.clone().svd(false, false).rank(1e-10);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != rank {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub = a.select_columns(&cols);
        if sub.clone().svd(false, false).rank(1e-10) < rank {
            continue;
        }
        let Ok(xs) = sub.clone().svd(true, true).solve(b, 1e-12) else {
            continue;
        };
        if (&sub * &xs - b).amax() > 1e-9 || xs.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (k, &j) in cols.iter().enumerate() {
            x[j] = xs[k];
        }
        out.push(x);
    }
    out
}

#[test]
fn vertex_is_a_basic_solution_by_enumeration() {
    let basis = gell_mann_basis(2).unwrap();
    for seed in 0..30 {
        let p = random_povm(2, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let r = to_rank1(&p).unwrap();
        let (cs, a) = build_constraints(&r, &basis).unwrap();
        assert!(cs.residual(a.as_slice()) <= 1e-9);
        let x = solve_vertex(&cs).unwrap();
        assert!(x.iter().filter(|&&v| v > 1e-9).count() <= 4);
        let vertices = enumerate_vertices(&cs.a, &cs.b);
        let hit = vertices
            .iter()
            .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-8));
        assert!(hit, "seed {seed}: {x:?} not among {} vertices", vertices.len());
    }
}

#[test]
fn qubit_four_outcome_decompositions() {
    let basis = gell_mann_basis(2).unwrap();
    for seed in 0..100 {
        let r = to_rank1(&random_povm(2, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()).unwrap();
        let dec = decompose(&r, &basis, r.len()).unwrap();
        assert!(dec.terms.len() <= r.len());
        assert!((dec.weight_sum() - 1.0).abs() <= 1e-9);
        assert!(dec.reconstruction_residual() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_invariants(seed in any::<u64>(), d in 2usize..=3, n in 2usize..=6) {
        let basis = gell_mann_basis(d).unwrap();
        let r = to_rank1(&random_povm(d, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()).unwrap();
        let dec = decompose(&r, &basis, r.len()).unwrap();
        prop_assert!((dec.weight_sum() - 1.0).abs() <= 1e-9);
        prop_assert!(dec.reconstruction_residual() <= 1e-8);
        for t in &dec.terms {
            prop_assert!(t.weight > 0.0 && t.weight <= 1.0 + 1e-12);
            prop_assert!(t.povm.len() <= d * d);
            let report = t.povm.povm().validate();
            prop_assert!(report.completeness_residual <= 1e-8);
            prop_assert!(report.min_eigenvalue() >= -tol::PSD);
        }
    }

    #[test]
    fn extract_step_identity(seed in any::<u64>()) {
        let basis = gell_mann_basis(2).unwrap();
        let r = to_rank1(&random_povm(2, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()).unwrap();
        let (cs, a) = build_constraints(&r, &basis).unwrap();
        let x = solve_vertex(&cs).unwrap();
        let step = extract_step(&a, &x).unwrap();
        prop_assert!(step.p > 0.0 && step.p <= 1.0);
        if !step.terminal {
            let sum: f64 = step.remainder.iter().sum();
            prop_assert!((sum - 2.0).abs() < 1e-9);
            let min = step.remainder.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(min.abs() < 1e-9);
        }
    }
}
