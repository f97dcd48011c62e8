use nalgebra::{DMatrix, DVector};

use crate::error::{precondition, Result};
use crate::povm::{Rank1Povm, RANK_DROP_TOL};
use crate::quantum_core::{HermitianBasis, HermitianOperator};

/// Element traces `a_i = Tr Q_i` of a rank-1 POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceVector(pub Vec<f64>);

impl TraceVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Completeness of a rescaled POVM written as `A x = b`.
///
/// Column `j` holds the traceless-basis coordinates of `Q_j / a_j`, with a final
/// row of ones for the trace; `b = (0, …, 0, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl ConstraintSystem {
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// `‖A x − b‖_∞`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        (&self.a * x - &self.b).amax()
    }
}

pub fn build_constraints(p: &Rank1Povm, basis: &HermitianBasis) -> Result<(ConstraintSystem, TraceVector)> {
    build_from_elements(p.elements(), basis)
}

pub(crate) fn build_from_elements(
    elements: &[HermitianOperator],
    basis: &HermitianBasis,
) -> Result<(ConstraintSystem, TraceVector)> {
    let d = basis.dim();
    if elements.is_empty() {
        return Err(precondition("cannot build constraints for an empty POVM"));
    }
    if let Some(e) = elements.iter().find(|e| e.dim() != d) {
        return Err(precondition(format!(
            "basis dimension {d} does not match element dimension {}",
            e.dim()
        )));
    }
    let traces: Vec<f64> = elements.iter().map(HermitianOperator::trace).collect();
    if let Some((i, t)) = traces.iter().enumerate().find(|(_, &t)| t <= RANK_DROP_TOL) {
        return Err(precondition(format!(
            "element {i} has trace {t:e}; degenerate elements must be dropped first"
        )));
    }
    let m = d * d;
    let n = elements.len();
    let mut a = DMatrix::<f64>::zeros(m, n);
    for (j, (q, &aj)) in elements.iter().zip(&traces).enumerate() {
        for (i, g) in basis.elements().iter().enumerate() {
            a[(i, j)] = q.trace_product(g) / aj;
        }
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = d as f64;
    Ok((ConstraintSystem { a, b }, TraceVector(traces)))
}
