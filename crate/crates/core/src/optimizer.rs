//! RSM and RESM search drivers and the convergence benchmark.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Error, Result};
use crate::extremal::decompose;
use crate::metrology::{CostFlags, CostFunction, CostValue};
use crate::povm::{random_povm, to_rank1, Povm, PovmJson};
use crate::quantum_core::{gell_mann_basis, HermitianBasis};

/// Errors below this are clamped before taking logarithms.
pub const ERROR_FLOOR: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "RSM")]
    Rsm,
    #[serde(rename = "RESM")]
    Resm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rsm => "RSM",
            Method::Resm => "RESM",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RSM" => Ok(Method::Rsm),
            "RESM" => Ok(Method::Resm),
            other => Err(precondition(format!("unknown search method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n_outcomes: usize,
    pub n_samples: usize,
    pub master_seed: u64,
    pub method: Method,
    /// Worker threads; 0 means the available parallelism.
    pub workers: usize,
    pub cost: Arc<CostFunction>,
}

impl SearchConfig {
    pub fn new(cost: Arc<CostFunction>, method: Method, n_outcomes: usize, n_samples: usize, master_seed: u64) -> Self {
        Self {
            n_outcomes,
            n_samples,
            master_seed,
            method,
            workers: 0,
            cost,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    pub fn dim(&self) -> usize {
        self.cost.dim()
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(precondition("n_samples must be at least 1"));
        }
        if self.n_outcomes == 0 {
            return Err(precondition("n_outcomes must be at least 1"));
        }
        if self.dim() == 0 {
            return Err(precondition("dimension must be at least 1"));
        }
        Ok(())
    }
}

/// Independent generator for one sample; the same sample index yields the
/// same parent POVM for either method.
pub fn sample_rng(master_seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(sample as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub sample: usize,
    /// Cumulative per-sample compute time up to and including this sample.
    pub seconds: f64,
    /// `None` while every sample so far has failed.
    pub best_value: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchFlags {
    pub failed_samples: usize,
    pub capped_outcomes: usize,
    pub failures: Vec<SampleFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleFailure {
    pub sample: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub method: Method,
    pub best_value: f64,
    pub best_cost: CostValue,
    pub best_povm: Povm,
    pub best_sample: usize,
    /// Best cost reached within each sample, `None` for failed samples.
    pub sample_values: Vec<Option<f64>>,
    pub trace: Vec<TracePoint>,
    pub flags: SearchFlags,
}

struct SampleOutcome {
    best: std::result::Result<(CostValue, Povm, CostFlags), Error>,
    seconds: f64,
}

fn rsm_sample(cfg: &SearchConfig, sample: usize) -> Result<(CostValue, Povm, CostFlags)> {
    let p = random_povm(cfg.dim(), cfg.n_outcomes, &mut sample_rng(cfg.master_seed, sample))?;
    let c = cfg.cost.evaluate(&p)?;
    Ok((c, p, c.flags))
}

fn resm_sample(cfg: &SearchConfig, basis: &HermitianBasis, sample: usize) -> Result<(CostValue, Povm, CostFlags)> {
    let p = random_povm(cfg.dim(), cfg.n_outcomes, &mut sample_rng(cfg.master_seed, sample))?;
    let r1 = to_rank1(&p)?;
    let dec = decompose(&r1, basis, r1.len() + 1)?;
    let table = cfg.cost.outcome_table(r1.elements())?;
    let mut flags = CostFlags::default();
    let mut best: Option<(CostValue, usize)> = None;
    for (k, term) in dec.terms.iter().enumerate() {
        let members: Vec<(usize, f64)> = term
            .povm
            .parents()
            .iter()
            .copied()
            .zip(term.scales.iter().copied())
            .collect();
        let c = cfg.cost.evaluate_scaled(&table, &members);
        flags.merge(c.flags);
        if best.is_none_or(|(b, _)| c.value > b.value) {
            best = Some((c, k));
        }
    }
    let (c, k) = best.ok_or_else(|| Error::Numerical("decomposition produced no terms".into()))?;
    let povm = dec
        .terms
        .into_iter()
        .nth(k)
        .expect("index from enumerate")
        .povm
        .into_povm();
    Ok((c, povm, flags))
}

fn run(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let basis = gell_mann_basis(cfg.dim())?;
    let work = |i: usize| {
        let start = Instant::now();
        let best = match cfg.method {
            Method::Rsm => rsm_sample(cfg, i),
            Method::Resm => resm_sample(cfg, &basis, i),
        };
        SampleOutcome {
            best,
            seconds: start.elapsed().as_secs_f64(),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let outcomes: Vec<SampleOutcome> = pool.install(|| (0..cfg.n_samples).into_par_iter().map(work).collect());

    let mut flags = SearchFlags::default();
    let mut trace = Vec::with_capacity(outcomes.len());
    let mut sample_values = Vec::with_capacity(outcomes.len());
    let mut seconds = 0.0;
    let mut best: Option<(CostValue, Povm, usize)> = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        seconds += out.seconds;
        match out.best {
            Ok((c, p, f)) => {
                flags.capped_outcomes += f.capped_outcomes;
                sample_values.push(Some(c.value));
                if best.as_ref().is_none_or(|(b, _, _)| c.value > b.value) {
                    best = Some((c, p, i));
                }
            }
            Err(e) => {
                flags.failed_samples += 1;
                flags.failures.push(SampleFailure {
                    sample: i,
                    message: e.to_string(),
                });
                sample_values.push(None);
            }
        }
        trace.push(TracePoint {
            sample: i,
            seconds,
            best_value: best.as_ref().map(|(c, _, _)| c.value),
        });
    }
    let (best_cost, best_povm, best_sample) =
        best.ok_or_else(|| Error::Numerical(format!("all {} samples failed", cfg.n_samples)))?;
    Ok(SearchResult {
        method: cfg.method,
        best_value: best_cost.value,
        best_cost,
        best_povm,
        best_sample,
        sample_values,
        trace,
        flags,
    })
}

/// Random sampling: scores each random POVM directly.
pub fn rsm_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.method != Method::Rsm {
        return Err(precondition("rsm_search requires method RSM"));
    }
    run(cfg)
}

/// Random extremal sampling: scores every extremal member of each random
/// POVM's rank-1 refinement.
pub fn resm_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.method != Method::Resm {
        return Err(precondition("resm_search requires method RESM"));
    }
    run(cfg)
}

pub fn search(cfg: &SearchConfig) -> Result<SearchResult> {
    run(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub method: Method,
    pub budget: usize,
    pub seconds: f64,
    pub best_value: f64,
    /// `reference − best_value` clamped at [`ERROR_FLOOR`]; absent without a reference.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodSlope {
    pub method: Method,
    /// Least-squares slope of `log10(error)` against `log10(seconds)`.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkWinner {
    pub method: Method,
    pub best_value: f64,
    pub povm: PovmJson,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub reference: Option<f64>,
    pub rows: Vec<BenchmarkRow>,
    pub slopes: Vec<MethodSlope>,
    /// Best POVM found by each method at the largest budget.
    pub winners: Vec<BenchmarkWinner>,
}

/// Runs each configuration once at the largest budget and reads the running
/// best at every budget. Sample prefixes are shared across budgets, so a
/// budget's row equals an independent run with that many samples.
pub fn benchmark(cfgs: &[SearchConfig], budgets: &[usize], reference: Option<f64>) -> Result<BenchmarkReport> {
    if budgets.is_empty() {
        return Err(precondition("budget list is empty"));
    }
    if budgets.contains(&0) {
        return Err(precondition("budgets must be at least 1"));
    }
    let max_budget = *budgets.iter().max().expect("nonempty");
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    let mut winners = Vec::new();
    for cfg in cfgs {
        let result = search(&cfg.clone().with_samples(max_budget))?;
        let mut points = Vec::new();
        for &b in budgets {
            let tp = &result.trace[b - 1];
            let best_value = tp
                .best_value
                .ok_or_else(|| Error::Numerical(format!("no successful sample within budget {b}")))?;
            let error = reference.map(|r| (r - best_value).max(ERROR_FLOOR));
            if let Some(e) = error {
                points.push((tp.seconds.log10(), e.log10()));
            }
            rows.push(BenchmarkRow {
                method: cfg.method,
                budget: b,
                seconds: tp.seconds,
                best_value,
                error,
            });
        }
        slopes.push(MethodSlope {
            method: cfg.method,
            slope: ols_slope(&points),
        });
        winners.push(BenchmarkWinner {
            method: cfg.method,
            best_value: result.best_value,
            povm: result.best_povm.to_json(),
        });
    }
    Ok(BenchmarkReport {
        reference,
        rows,
        slopes,
        winners,
    })
}

/// `None` when the abscissae do not span an interval.
pub fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
