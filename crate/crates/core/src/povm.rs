//! POVMs: construction, validation, random generation, rank-1 refinement and
//! outcome statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::quantum_core::{
    hermiticity_residual, max_abs, sample_haar_unitary, tol, ComplexMatrix, DensityOperator, HermitianOperator,
};

/// `‖Σ Q_m − I‖_max` allowed for a valid POVM.
pub const COMPLETE_TOL: f64 = 1e-10;
/// Second-largest eigenvalue allowed for a rank-1 element.
pub const RANK_TOL: f64 = 1e-10;
/// Spectral weights at or below this are discarded by [`to_rank1`].
pub const RANK_DROP_TOL: f64 = 1e-12;

/// Residuals of a candidate POVM against its invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub completeness_residual: f64,
    pub hermiticity_residual: f64,
    pub min_eigenvalues: Vec<f64>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Checks an arbitrary list of matrices against the POVM invariants with the
/// given completeness tolerance.
pub fn validate_elements(dim: usize, elements: &[ComplexMatrix], complete_tol: f64) -> ValidationReport {
    let mut failures = Vec::new();
    let mut herm = 0.0f64;
    let mut min_eigenvalues = Vec::with_capacity(elements.len());
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (m, q) in elements.iter().enumerate() {
        if q.nrows() != dim || q.ncols() != dim {
            failures.push(format!(
                "element {m} is {}x{}, expected {dim}x{dim}",
                q.nrows(),
                q.ncols()
            ));
            min_eigenvalues.push(f64::NAN);
            continue;
        }
        let r = hermiticity_residual(q);
        herm = herm.max(r);
        if r > tol::HERM {
            failures.push(format!("element {m} is not Hermitian (residual {r:e})"));
            min_eigenvalues.push(f64::NAN);
        } else {
            let h = HermitianOperator::new_unchecked((q + q.adjoint()).scale(0.5));
            match h.min_eigenvalue() {
                Ok(min) => {
                    if min < -tol::PSD {
                        failures.push(format!("element {m} has negative eigenvalue {min:e}"));
                    }
                    min_eigenvalues.push(min);
                }
                Err(e) => {
                    failures.push(format!("element {m}: {e}"));
                    min_eigenvalues.push(f64::NAN);
                }
            }
        }
        sum += q;
    }
    if elements.is_empty() {
        failures.push("POVM has no elements".into());
    }
    let completeness_residual = max_abs(&(sum - ComplexMatrix::identity(dim, dim)));
    if completeness_residual.is_nan() || completeness_residual > complete_tol {
        failures.push(format!("completeness residual {completeness_residual:e}"));
    }
    ValidationReport {
        completeness_residual,
        hermiticity_residual: herm,
        min_eigenvalues,
        failures,
    }
}

/// A finite list of positive semidefinite operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        Self::with_tolerance(elements, COMPLETE_TOL)
    }

    /// Validates completeness against `complete_tol` instead of [`COMPLETE_TOL`].
    pub fn with_tolerance(elements: Vec<HermitianOperator>, complete_tol: f64) -> Result<Self> {
        let dim = elements
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| precondition("POVM has no elements"))?;
        let mats: Vec<ComplexMatrix> = elements.iter().map(|e| e.matrix().clone()).collect();
        let report = validate_elements(dim, &mats, complete_tol);
        if !report.passed() {
            return Err(precondition(format!("invalid POVM: {}", report.failures.join("; "))));
        }
        Ok(Self { dim, elements })
    }

    pub fn new_unchecked(dim: usize, elements: Vec<HermitianOperator>) -> Self {
        Self { dim, elements }
    }

    /// Projective measurement in the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut diag = vec![0.0; dim];
                diag[k] = 1.0;
                HermitianOperator::from_real_diagonal(&diag)
            })
            .collect();
        Self { dim, elements }
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    pub fn sum(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.elements {
            s += e.matrix();
        }
        s
    }

    pub fn completeness_residual(&self) -> f64 {
        max_abs(&(self.sum() - ComplexMatrix::identity(self.dim, self.dim)))
    }

    pub fn validate(&self) -> ValidationReport {
        let mats: Vec<ComplexMatrix> = self.elements.iter().map(|e| e.matrix().clone()).collect();
        validate_elements(self.dim, &mats, COMPLETE_TOL)
    }

    pub fn to_json(&self) -> PovmJson {
        PovmJson {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|e| {
                    let m = e.matrix();
                    (0..self.dim)
                        .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
                        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: PovmJson = serde_json::from_str(s)?;
        doc.into_povm()
    }
}

/// On-disk POVM form: each element is its `dim²` entries in row-major order as
/// `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub elements: Vec<Vec<[f64; 2]>>,
}

impl PovmJson {
    pub fn into_povm(self) -> Result<Povm> {
        let d = self.dim;
        if d == 0 {
            return Err(precondition("POVM dimension must be at least 1"));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (m, entries) in self.elements.iter().enumerate() {
            if entries.len() != d * d {
                return Err(precondition(format!(
                    "element {m} has {} entries, expected {}",
                    entries.len(),
                    d * d
                )));
            }
            let mat = ComplexMatrix::from_fn(d, d, |i, j| {
                let [re, im] = entries[i * d + j];
                num_complex::Complex64::new(re, im)
            });
            elements.push(HermitianOperator::new(mat)?);
        }
        Povm::new(elements)
    }
}

/// A POVM whose elements are all rank 1, each labeled with the index of the
/// element of the measurement it was refined from.
#[derive(Clone, Debug, PartialEq)]
pub struct Rank1Povm {
    povm: Povm,
    parents: Vec<usize>,
}

impl Rank1Povm {
    pub fn new(elements: Vec<HermitianOperator>, parents: Vec<usize>) -> Result<Self> {
        if elements.len() != parents.len() {
            return Err(precondition("one parent label is required per element"));
        }
        let povm = Povm::new(elements)?;
        for (i, e) in povm.elements().iter().enumerate() {
            let ev = e.eig()?.eigenvalues;
            if ev.len() >= 2 && ev[ev.len() - 2] > RANK_TOL {
                return Err(precondition(format!(
                    "element {i} is not rank 1 (second eigenvalue {:e})",
                    ev[ev.len() - 2]
                )));
            }
        }
        Ok(Self { povm, parents })
    }

    pub fn new_unchecked(povm: Povm, parents: Vec<usize>) -> Self {
        Self { povm, parents }
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn into_povm(self) -> Povm {
        self.povm
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        self.povm.elements()
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }
}

/// Random POVM with `n_out` outcomes on a `d`-dimensional system, obtained by
/// contracting a Haar unitary on system ⊗ ancilla with the ancilla prepared in
/// its first basis state.
///
/// With composite index `(i, m) ↦ i·n_out + m`, the isometry block is
/// `(V_m)_{ij} = U_{(i,m),(j,0)}` and `Q_m = V_m† V_m`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, n_out: usize, rng: &mut R) -> Result<Povm> {
    if d == 0 || n_out == 0 {
        return Err(precondition(format!(
            "random POVM needs d >= 1 and n_out >= 1, got d={d}, n_out={n_out}"
        )));
    }
    let u = sample_haar_unitary(d * n_out, rng)?;
    let u = u.matrix();
    let elements: Vec<HermitianOperator> = (0..n_out)
        .map(|m| {
            let v = ComplexMatrix::from_fn(d, d, |i, j| u[(i * n_out + m, j * n_out)]);
            HermitianOperator::new_unchecked(v.adjoint() * v)
        })
        .collect();
    let povm = Povm::new_unchecked(d, elements);
    let report = povm.validate();
    if !report.passed() {
        return Err(Error::Consistency(format!(
            "random POVM violates invariants: {}",
            report.failures.join("; ")
        )));
    }
    Ok(povm)
}

/// Replaces each element by the rank-1 pieces `λ_k |v_k⟩⟨v_k|` of its spectral
/// decomposition, dropping pieces with `λ_k <= RANK_DROP_TOL`.
pub fn to_rank1(p: &Povm) -> Result<Rank1Povm> {
    let mut elements = Vec::new();
    let mut parents = Vec::new();
    for (m, q) in p.elements().iter().enumerate() {
        let eig = q.eig()?;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > RANK_DROP_TOL {
                let v = eig.eigenvectors.column(k);
                elements.push(HermitianOperator::outer(&v).scaled(lambda));
                parents.push(m);
            }
        }
    }
    Ok(Rank1Povm::new_unchecked(
        Povm::new_unchecked(p.dim(), elements),
        parents,
    ))
}

/// `q_m = Re Tr(ρ Q_m)`, clamped to `[0, 1]` after a tolerance check.
pub fn outcome_distribution(p: &Povm, rho: &DensityOperator) -> Result<Vec<f64>> {
    if p.dim() != rho.dim() {
        return Err(precondition(format!(
            "POVM dimension {} does not match state dimension {}",
            p.dim(),
            rho.dim()
        )));
    }
    p.elements()
        .iter()
        .enumerate()
        .map(|(m, q)| {
            let prob = rho.as_hermitian().trace_product(q);
            if !(-tol::PSD..=1.0 + tol::PSD).contains(&prob) {
                Err(Error::Numerical(format!("outcome {m} has probability {prob:e}")))
            } else {
                Ok(prob.clamp(0.0, 1.0))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{ComplexVector, ONE, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(values)
    }

    #[test]
    fn single_outcome_is_identity() {
        let p = random_povm(2, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(max_abs(&(p.elements()[0].matrix() - ComplexMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn qubit_four_outcomes_complete() {
        for seed in 0..20 {
            let p = random_povm(2, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!(p.completeness_residual() <= 1e-10);
        }
    }

    #[test]
    fn qutrit_elements_are_psd() {
        let p = random_povm(3, 5, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
        for q in p.elements() {
            assert!(q.eig().unwrap().eigenvalues.iter().all(|&l| l >= -1e-12));
        }
    }

    #[test]
    fn ancilla_convention_pins_completeness() {
        // Reading the isometry from the ancilla *column* index instead breaks
        // completeness; guard against swapping the convention.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (d, n) = (2, 3);
        let u = sample_haar_unitary(d * n, &mut rng).unwrap();
        let u = u.matrix();
        let mut wrong = ComplexMatrix::zeros(d, d);
        for m in 0..n {
            let v = ComplexMatrix::from_fn(d, d, |i, j| u[(i * n, j * n + m)]);
            wrong += v.adjoint() * v;
        }
        assert!(max_abs(&(wrong - ComplexMatrix::identity(d, d))) > 1e-3);
    }

    #[test]
    fn rank1_leaves_projective_measurement_alone() {
        let r = to_rank1(&Povm::computational_basis(2)).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.parents(), &[0, 1]);
    }

    #[test]
    fn rank1_splits_identity() {
        let r = to_rank1(&Povm::trivial(2)).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.parents(), &[0, 0]);
        assert!(r.povm().completeness_residual() < 1e-14);
        assert!(Rank1Povm::new(r.elements().to_vec(), r.parents().to_vec()).is_ok());
    }

    #[test]
    fn rank1_of_random_qubit_povm() {
        let p = random_povm(2, 2, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let r = to_rank1(&p).unwrap();
        assert!(r.povm().completeness_residual() <= 1e-10);
        for e in r.elements() {
            assert!(e.eig().unwrap().eigenvalues[0].abs() <= 1e-10);
        }
    }

    #[test]
    fn distribution_of_basis_state() {
        let rho = DensityOperator::pure(&ComplexVector::from_vec(vec![ONE, ZERO])).unwrap();
        let q = outcome_distribution(&Povm::computational_basis(2), &rho).unwrap();
        assert_eq!(q, vec![1.0, 0.0]);
    }

    #[test]
    fn distribution_of_maximally_mixed_state() {
        let p = random_povm(3, 4, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let q = outcome_distribution(&p, &DensityOperator::maximally_mixed(3)).unwrap();
        for (qm, e) in q.iter().zip(p.elements()) {
            assert!((qm - e.trace() / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn distribution_dimension_mismatch() {
        let err = outcome_distribution(&Povm::computational_basis(2), &DensityOperator::maximally_mixed(3));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn validate_projective() {
        let r = Povm::computational_basis(2).validate();
        assert!(r.passed());
        assert!(r.completeness_residual <= 1e-15);
        assert!(r.hermiticity_residual <= 1e-15);
    }

    #[test]
    fn validate_overcomplete() {
        let mats = vec![diag(&[1.1, 0.0]).into_matrix(), diag(&[0.0, 1.0]).into_matrix()];
        let r = validate_elements(2, &mats, COMPLETE_TOL);
        assert!(!r.passed());
        assert!((r.completeness_residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn validate_negative_element() {
        let mats = vec![diag(&[1.0, -0.01]).into_matrix(), diag(&[0.0, 1.01]).into_matrix()];
        let r = validate_elements(2, &mats, COMPLETE_TOL);
        assert!(!r.passed());
        assert!(r.completeness_residual < 1e-15);
        assert!((r.min_eigenvalue() + 0.01).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = random_povm(3, 3, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let back = Povm::from_json_str(&p.to_json_string().unwrap()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in p.elements().iter().zip(back.elements()) {
            assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
        }
        let bad = r#"{"dim":2,"elements":[[[1,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(Povm::from_json_str(bad).is_err());
        let short = r#"{"dim":2,"elements":[[[1,0]]]}"#;
        assert!(Povm::from_json_str(short).is_err());
    }
}
