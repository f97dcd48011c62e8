//! Dense complex linear algebra, Hermitian eigendecomposition, Haar sampling and
//! the generalized Gell-Mann basis.

mod basis;
mod eig;
mod haar;
mod matrix;

pub use basis::{gell_mann_basis, HermitianBasis};
pub use eig::{hermitian_eig, HermitianEigen};
pub use haar::sample_haar_unitary;
pub use matrix::{
    hermiticity_residual, is_finite, max_abs, tol, unitarity_residual, ComplexMatrix, ComplexVector, DensityOperator,
    HermitianOperator, UnitaryMatrix, I, ONE, ZERO,
};
