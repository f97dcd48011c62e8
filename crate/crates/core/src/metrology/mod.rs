//! Convex information functionals over POVMs.
//!
//! Both functionals are sums over outcomes of `(p′)² / p` with
//! `p = Tr(ρ Q)` and `p′ = Tr(ρ′ Q)`, so they are convex in the POVM and their
//! maximum is attained at an extremal measurement.

mod ansatz;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::models::{prior_fisher, ParameterizedModel, Prior, QuadratureSpec};
use crate::povm::Povm;
use crate::quantum_core::HermitianOperator;

pub use ansatz::{ansatz_scan, uniform_grid, AnsatzFamily, AnsatzOptimum, DEFAULT_XI_GRID, XI_TIE_TOL};

/// Probabilities at or below this are treated as vanishing.
pub const PROB_FLOOR: f64 = 1e-12;
/// A vanishing outcome with `|p′|` at or below this contributes nothing.
pub const DERIV_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostKind {
    FisherAt { theta: f64 },
    VanTrees { prior: Prior, quadrature: QuadratureSpec },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostFlags {
    /// Outcomes with vanishing probability but non-vanishing derivative, whose
    /// contribution was capped at `(p′)² / PROB_FLOOR`.
    pub capped_outcomes: usize,
}

impl CostFlags {
    pub fn merge(&mut self, other: CostFlags) {
        self.capped_outcomes += other.capped_outcomes;
    }
}

/// A cost evaluation. `value = fisher_term + prior_term`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostValue {
    pub value: f64,
    pub fisher_term: f64,
    pub prior_term: f64,
    pub flags: CostFlags,
}

struct Node {
    weight: f64,
    rho: HermitianOperator,
    drho: HermitianOperator,
}

/// Outcome probabilities and their θ-derivatives at every quadrature node,
/// for a fixed list of POVM elements.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    outcomes: usize,
    /// Row-major `[node][outcome]`.
    probs: Vec<f64>,
    derivs: Vec<f64>,
}

impl OutcomeTable {
    pub fn outcomes(&self) -> usize {
        self.outcomes
    }
}

fn fisher_contribution(p: f64, dp: f64, flags: &mut CostFlags) -> f64 {
    if p > PROB_FLOOR {
        dp * dp / p
    } else if dp.abs() <= DERIV_FLOOR {
        0.0
    } else {
        flags.capped_outcomes += 1;
        dp * dp / PROB_FLOOR
    }
}

/// Fisher information at a point, or Van Trees information under a prior, of
/// the outcome statistics of a POVM on a model.
pub struct CostFunction {
    kind: CostKind,
    model: Arc<dyn ParameterizedModel>,
    nodes: Vec<Node>,
    prior_term: f64,
}

impl std::fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostFunction")
            .field("kind", &self.kind)
            .field("model", &self.model.descriptor())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl CostFunction {
    pub fn fisher_at(model: Arc<dyn ParameterizedModel>, theta: f64) -> Self {
        let nodes = vec![Node {
            weight: 1.0,
            rho: model.state(theta).as_hermitian().clone(),
            drho: model.derivative(theta),
        }];
        Self {
            kind: CostKind::FisherAt { theta },
            model,
            nodes,
            prior_term: 0.0,
        }
    }

    /// The state and its derivative are tabulated once on the prior's
    /// quadrature grid.
    pub fn van_trees(model: Arc<dyn ParameterizedModel>, prior: Prior, quadrature: QuadratureSpec) -> Self {
        let nodes = prior
            .weighted_nodes(&quadrature)
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(theta, weight)| Node {
                weight,
                rho: model.state(theta).as_hermitian().clone(),
                drho: model.derivative(theta),
            })
            .collect();
        let prior_term = prior_fisher(&prior, &quadrature).value;
        Self {
            kind: CostKind::VanTrees { prior, quadrature },
            model,
            nodes,
            prior_term,
        }
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    pub fn model(&self) -> &Arc<dyn ParameterizedModel> {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn prior_term(&self) -> f64 {
        self.prior_term
    }

    pub fn evaluate(&self, p: &Povm) -> Result<CostValue> {
        self.evaluate_elements(p.elements())
    }

    pub fn evaluate_elements(&self, elements: &[HermitianOperator]) -> Result<CostValue> {
        let table = self.outcome_table(elements)?;
        let all: Vec<(usize, f64)> = (0..elements.len()).map(|i| (i, 1.0)).collect();
        Ok(self.evaluate_scaled(&table, &all))
    }

    pub fn outcome_table(&self, elements: &[HermitianOperator]) -> Result<OutcomeTable> {
        let d = self.dim();
        if let Some(e) = elements.iter().find(|e| e.dim() != d) {
            return Err(precondition(format!(
                "POVM dimension {} does not match model dimension {d}",
                e.dim()
            )));
        }
        let n = elements.len();
        let mut probs = Vec::with_capacity(n * self.nodes.len());
        let mut derivs = Vec::with_capacity(n * self.nodes.len());
        for node in &self.nodes {
            for q in elements {
                probs.push(node.rho.trace_product(q));
                derivs.push(node.drho.trace_product(q));
            }
        }
        Ok(OutcomeTable {
            outcomes: n,
            probs,
            derivs,
        })
    }

    /// Cost of the POVM whose elements are `s · E_i` for each `(i, s)`, with
    /// `E_i` the elements tabulated in `table`.
    ///
    /// Panics if an index is out of range for the table.
    pub fn evaluate_scaled(&self, table: &OutcomeTable, members: &[(usize, f64)]) -> CostValue {
        let mut flags = CostFlags::default();
        let mut fisher = 0.0;
        for (k, node) in self.nodes.iter().enumerate() {
            let row = k * table.outcomes;
            let mut f = 0.0;
            for &(i, s) in members {
                f += fisher_contribution(s * table.probs[row + i], s * table.derivs[row + i], &mut flags);
            }
            fisher += node.weight * f;
        }
        CostValue {
            value: fisher + self.prior_term,
            fisher_term: fisher,
            prior_term: self.prior_term,
            flags,
        }
    }
}

/// Fisher information of `p` on `model` at `theta`.
pub fn fisher_information(p: &Povm, model: Arc<dyn ParameterizedModel>, theta: f64) -> Result<f64> {
    Ok(CostFunction::fisher_at(model, theta).evaluate(p)?.value)
}

/// Prior-averaged Fisher information plus the prior's own Fisher information.
pub fn van_trees_information(
    p: &Povm,
    model: Arc<dyn ParameterizedModel>,
    prior: Prior,
    quadrature: QuadratureSpec,
) -> Result<CostValue> {
    CostFunction::van_trees(model, prior, quadrature).evaluate(p)
}
