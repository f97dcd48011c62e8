//! Decomposition of rank-1 POVMs into convex combinations of extremal POVMs.
//!
//! Each step solves the feasibility program `A x = b, x ≥ 0` for a vertex
//! `x_ext`, splits the trace vector as `a = p·x_ext + (1 − p)·x'`, records the
//! extremal member and recurses on the remainder, which has at least one fewer
//! outcome.

mod constraints;
mod simplex;

pub use constraints::{build_constraints, ConstraintSystem, TraceVector};
pub use simplex::{basic_feasible_solution, BasicSolution};

use nalgebra::DVector;

use crate::error::{precondition, Error, Result};
use crate::povm::{Povm, Rank1Povm};
use crate::quantum_core::{max_abs, ComplexMatrix, HermitianBasis, HermitianOperator};

/// Coordinates at or below this count as zero in the vertex and the remainder.
pub const LP_TOL: f64 = 1e-9;
/// Completeness required of every extracted member.
pub const MEMBER_COMPLETE_TOL: f64 = 1e-8;
const POLISH_TOL: f64 = 1e-13;

/// A vertex of the constraint polytope.
pub fn solve_vertex(cs: &ConstraintSystem) -> Result<Vec<f64>> {
    let sol = basic_feasible_solution(&cs.a, &cs.b)?;
    let residual = cs.residual(&sol.x);
    if residual > LP_TOL {
        return Err(Error::LinearProgram(format!("vertex residual {residual:e}")));
    }
    Ok(sol.x)
}

/// Outcome of one splitting step.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractStep {
    /// Weight of the vertex in the split.
    pub p: f64,
    /// Remainder trace vector `x'`, with vanishing coordinates set to exactly 0.
    /// Empty when `terminal`.
    pub remainder: Vec<f64>,
    /// `a` is itself the vertex (up to `LP_TOL`), so the recursion stops.
    pub terminal: bool,
}

/// Splits `a = p·x_ext + (1 − p)·x'` with the largest `p` keeping `x' ≥ 0`.
pub fn extract_step(a: &TraceVector, x_ext: &[f64]) -> Result<ExtractStep> {
    if a.len() != x_ext.len() {
        return Err(precondition(format!(
            "trace vector has {} entries, vertex has {}",
            a.len(),
            x_ext.len()
        )));
    }
    let p =
        a.0.iter()
            .zip(x_ext)
            .filter(|(_, &x)| x > LP_TOL)
            .map(|(&ai, &x)| ai / x)
            .fold(f64::INFINITY, f64::min);
    if !p.is_finite() {
        return Err(Error::Numerical("vertex has empty support".into()));
    }
    if p <= 0.0 {
        return Err(Error::Numerical(format!(
            "split weight {p:e}: vertex support lies outside the trace vector's support"
        )));
    }
    let p = p.min(1.0);
    if p >= 1.0 - LP_TOL {
        return Ok(ExtractStep {
            p: 1.0,
            remainder: Vec::new(),
            terminal: true,
        });
    }
    let mut remainder = Vec::with_capacity(a.len());
    for (&ai, &x) in a.0.iter().zip(x_ext) {
        let r = (ai - p * x) / (1.0 - p);
        if r < -LP_TOL {
            return Err(Error::Numerical(format!("remainder coordinate {r:e} is negative")));
        }
        remainder.push(if r <= LP_TOL { 0.0 } else { r });
    }
    Ok(ExtractStep {
        p,
        remainder,
        terminal: false,
    })
}

/// One extremal POVM of a decomposition together with its convex weight.
#[derive(Clone, Debug)]
pub struct ExtremalTerm {
    pub weight: f64,
    /// Element `k` equals `scales[k]` times parent element `povm.parents()[k]`.
    pub scales: Vec<f64>,
    pub povm: Rank1Povm,
}

#[derive(Clone, Debug)]
pub struct ExtremalDecomposition {
    pub terms: Vec<ExtremalTerm>,
    pub parent: Rank1Povm,
}

impl ExtremalDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `Σ_k w_k Q_k` matched to parent outcomes; absent elements count as zero.
    pub fn reconstruct(&self) -> Vec<HermitianOperator> {
        let d = self.parent.dim();
        let mut out = vec![ComplexMatrix::zeros(d, d); self.parent.len()];
        for term in &self.terms {
            for (e, &parent) in term.povm.elements().iter().zip(term.povm.parents()) {
                out[parent] += e.matrix().scale(term.weight);
            }
        }
        out.into_iter().map(HermitianOperator::new_unchecked).collect()
    }

    /// Elementwise `max` deviation between the reconstruction and the parent.
    pub fn reconstruction_residual(&self) -> f64 {
        self.reconstruct()
            .iter()
            .zip(self.parent.elements())
            .map(|(r, p)| max_abs(&(r.matrix() - p.matrix())))
            .fold(0.0, f64::max)
    }
}

/// Decomposes `p` into extremal rank-1 POVMs.
///
/// Weights are cumulative: the `k`-th term carries `(1 − p_1)…(1 − p_{k−1})·p_k`.
pub fn decompose(p: &Rank1Povm, basis: &HermitianBasis, max_iter: usize) -> Result<ExtremalDecomposition> {
    if p.is_empty() {
        return Err(precondition("cannot decompose an empty POVM"));
    }
    if basis.dim() != p.dim() {
        return Err(precondition(format!(
            "basis dimension {} does not match POVM dimension {}",
            basis.dim(),
            p.dim()
        )));
    }
    let d = p.dim();
    let parent_elements = p.elements();

    // Current POVM: element k is scale[k] · parent[active[k]].
    let mut active: Vec<usize> = (0..p.len()).collect();
    let mut scale: Vec<f64> = vec![1.0; p.len()];
    let mut remaining = 1.0;
    let mut terms = Vec::new();

    for _ in 0..max_iter {
        let current: Vec<HermitianOperator> = active
            .iter()
            .zip(&scale)
            .map(|(&i, &s)| parent_elements[i].scaled(s))
            .collect();
        let (cs, a) = constraints::build_from_elements(&current, basis)?;
        let x = solve_vertex(&cs)?;
        let step = extract_step(&a, &x)?;

        let member = extremal_member(&current, &active, &scale, &a, &x, d)?;
        if step.terminal {
            terms.push(ExtremalTerm {
                weight: remaining,
                ..member
            });
            return Ok(ExtremalDecomposition {
                terms,
                parent: p.clone(),
            });
        }
        terms.push(ExtremalTerm {
            weight: remaining * step.p,
            ..member
        });
        remaining *= 1.0 - step.p;
        let remainder = polish_remainder(&cs, step.remainder);

        let mut next_active = Vec::with_capacity(active.len());
        let mut next_scale = Vec::with_capacity(active.len());
        for (k, &r) in remainder.iter().enumerate() {
            if r > 0.0 {
                next_active.push(active[k]);
                next_scale.push(scale[k] * r / a.0[k]);
            }
        }
        if next_active.len() >= active.len() {
            return Err(Error::Numerical("splitting step removed no outcome".into()));
        }
        active = next_active;
        scale = next_scale;
    }
    Err(Error::MaxIterations {
        max_iter,
        remaining_weight: remaining,
        partial: Box::new(ExtremalDecomposition {
            terms,
            parent: p.clone(),
        }),
    })
}

/// Dividing by `1 − p` amplifies the vertex's rounding when `p` is near 1, so
/// the remainder is pulled back onto `A x = b` by a minimum-norm least-squares
/// correction on its support.
fn polish_remainder(cs: &ConstraintSystem, mut x: Vec<f64>) -> Vec<f64> {
    for _ in 0..4 {
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        if support.is_empty() {
            break;
        }
        let a_s = cs.a.select_columns(&support);
        let x_s = DVector::from_iterator(support.len(), support.iter().map(|&i| x[i]));
        let res = &a_s * &x_s - &cs.b;
        if res.amax() <= POLISH_TOL {
            break;
        }
        let Ok(delta) = a_s.svd(true, true).solve(&res, POLISH_TOL) else {
            break;
        };
        for (k, &i) in support.iter().enumerate() {
            let v = x[i] - delta[k];
            x[i] = if v <= LP_TOL { 0.0 } else { v };
        }
    }
    x
}

fn extremal_member(
    current: &[HermitianOperator],
    active: &[usize],
    scale: &[f64],
    a: &TraceVector,
    x: &[f64],
    d: usize,
) -> Result<ExtremalTerm> {
    let mut elements = Vec::new();
    let mut parents = Vec::new();
    let mut scales = Vec::new();
    for (k, &xk) in x.iter().enumerate() {
        if xk > LP_TOL {
            let f = xk / a.0[k];
            elements.push(current[k].scaled(f));
            parents.push(active[k]);
            scales.push(scale[k] * f);
        }
    }
    if elements.len() > d * d {
        return Err(Error::Numerical(format!(
            "vertex has {} outcomes, more than d² = {}",
            elements.len(),
            d * d
        )));
    }
    let povm = Povm::new_unchecked(d, elements);
    let residual = povm.completeness_residual();
    if residual > MEMBER_COMPLETE_TOL {
        return Err(Error::Numerical(format!(
            "extremal member completeness residual {residual:e}"
        )));
    }
    Ok(ExtremalTerm {
        weight: 0.0,
        scales,
        povm: Rank1Povm::new_unchecked(povm, parents),
    })
}
