use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianOperator, I};
use crate::error::{precondition, Result};

/// Orthonormal traceless basis of the `d² − 1` dimensional space of traceless
/// Hermitian `d × d` matrices, under the Hilbert-Schmidt inner product.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `G[i][j] = Tr(G_i G_j)`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| a.trace_product(b)).collect())
            .collect()
    }
}

/// Generalized Gell-Mann matrices normalized to unit Hilbert-Schmidt norm:
/// symmetric pairs, then antisymmetric pairs, then the diagonal ladder.
pub fn gell_mann_basis(d: usize) -> Result<HermitianBasis> {
    if d == 0 {
        return Err(precondition("basis dimension must be at least 1"));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = Complex64::new(inv_sqrt2, 0.0);
            m[(k, j)] = Complex64::new(inv_sqrt2, 0.0);
            elements.push(HermitianOperator::new_unchecked(m));
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = -I * inv_sqrt2;
            m[(k, j)] = I * inv_sqrt2;
            elements.push(HermitianOperator::new_unchecked(m));
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|i| match i.cmp(&l) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -(l as f64) * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        elements.push(HermitianOperator::from_real_diagonal(&diag));
    }
    Ok(HermitianBasis { dim: d, elements })
}
