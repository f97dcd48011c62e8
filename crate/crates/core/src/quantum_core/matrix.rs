//! Dense complex matrices and the operator newtypes built on them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eig::{hermitian_eig, HermitianEigen};
use crate::error::{precondition, Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Numerical tolerances shared by the quantum primitives.
pub mod tol {
    pub const HERM: f64 = 1e-10;
    pub const UNITARY: f64 = 1e-10;
    pub const ORTH: f64 = 1e-10;
    pub const TRACE: f64 = 1e-10;
    pub const PSD: f64 = 1e-9;
    pub const EIG: f64 = 1e-11;
}

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |m_ij - conj(m_ji)|`, or infinity for non-square input.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `‖U†U − I‖_max`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let prod = u.adjoint() * u;
    max_abs(&(prod - ComplexMatrix::identity(u.nrows(), u.ncols())))
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A square matrix equal to its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Validates hermiticity within [`tol::HERM`] and stores the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(precondition(format!(
                "Hermitian operator must be a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !is_finite(&m) {
            return Err(precondition("matrix has non-finite entries"));
        }
        let res = hermiticity_residual(&m);
        if res > tol::HERM {
            return Err(precondition(format!("matrix is not Hermitian (residual {res:e})")));
        }
        Ok(Self(hermitian_part(&m)))
    }

    /// Wraps `m` without checks. Callers guarantee hermiticity by construction.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &ComplexVector) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Re Tr(self · other)` for two Hermitian operators of equal dimension.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        // Tr(AB) = Σ_jk A_jk B_kj = Σ_jk A_jk conj(B_jk) when B is Hermitian.
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianOperator) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn eig(&self) -> Result<HermitianEigen> {
        hermitian_eig(&self.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues[0])
    }
}

/// A unit-trace positive semidefinite Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(precondition(format!("density operator has trace {tr}")));
        }
        let min = h.min_eigenvalue()?;
        if min < -tol::PSD {
            return Err(precondition(format!(
                "density operator has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(h))
    }

    pub fn new_unchecked(h: HermitianOperator) -> Self {
        Self(h)
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(precondition("state vector has zero or non-finite norm"));
        }
        let v = psi.unscale(norm);
        Ok(Self(HermitianOperator::outer(&v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianOperator::identity(dim).scaled(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0)
    }
}

/// A square matrix with `U†U = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let res = unitarity_residual(&m);
        if res > tol::UNITARY {
            return Err(Error::Precondition(format!("matrix is not unitary (residual {res:e})")));
        }
        Ok(Self(m))
    }

    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        self.0.column(j).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::Precondition(_))));
    }

    #[test]
    fn trace_product_matches_matrix_product() {
        let a = HermitianOperator::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[ONE, Complex64::new(0.3, -0.2), Complex64::new(0.3, 0.2), ZERO],
        ))
        .unwrap();
        let b = HermitianOperator::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.5, 0.0), I, -I, Complex64::new(-2.0, 0.0)],
        ))
        .unwrap();
        let direct = (a.matrix() * b.matrix()).trace().re;
        assert!((a.trace_product(&b) - direct).abs() < 1e-15);
    }

    #[test]
    fn density_rejects_bad_trace_and_negativity() {
        let m = ComplexMatrix::identity(2, 2);
        assert!(DensityOperator::new(m).is_err());
        let m = ComplexMatrix::from_row_slice(2, 2, &[Complex64::new(1.1, 0.0), ZERO, ZERO, Complex64::new(-0.1, 0.0)]);
        assert!(DensityOperator::new(m).is_err());
        assert!(DensityOperator::new(DensityOperator::maximally_mixed(3).matrix().clone()).is_ok());
    }
}
