use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use resm::metrology::{ansatz_scan, uniform_grid, AnsatzFamily, CostFunction, CostKind};
use resm::models::{
    CoherentPhaseModel, CoherentThermalModel, ModelDescriptor, ParameterizedModel, Prior, QuadratureSpec,
    QubitPhaseModel,
};
use resm::optimizer::{benchmark, search, BenchmarkReport, SearchConfig, SearchResult};
use resm::Povm;

use crate::error::CliError;
use crate::spec::{CostArg, Format, Objective, RunSpec};

/// One row of the result table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub value: f64,
    pub fisher_term: f64,
    pub prior_term: f64,
    pub ansatz_xi: f64,
    pub ansatz_value: f64,
    pub best_sample: Option<usize>,
    pub failed_samples: usize,
    pub capped_outcomes: usize,
}

#[derive(Clone, Debug, Serialize)]
struct PointMeta {
    sweep_value: f64,
    model: ModelDescriptor,
    cost: CostKind,
    reference: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct Meta<'a> {
    library_version: &'static str,
    cli_version: &'static str,
    spec: &'a RunSpec,
    sweep_variable: &'static str,
    points: Vec<PointMeta>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub benchmark: Option<BenchmarkReport>,
    pub files: Vec<PathBuf>,
    /// Per-sample failures that did not abort the run.
    pub warnings: Vec<String>,
}

struct Problem {
    cost: Arc<CostFunction>,
    family: AnsatzFamily,
    /// Known maximum of the cost, when one exists in closed form.
    reference: Option<f64>,
}

fn problem(spec: &RunSpec, x: f64) -> Result<Problem, CliError> {
    let (eta, mean_photon) = if spec.is_qubit() {
        (x, spec.mean_photon)
    } else {
        (spec.eta, x)
    };
    let (model, family, prior): (Arc<dyn ParameterizedModel>, AnsatzFamily, Prior) = match spec.objective {
        Objective::Qubit => (
            Arc::new(QubitPhaseModel::new(eta)?),
            AnsatzFamily::qubit(eta),
            Prior::uniform_circle(),
        ),
        Objective::CohPlusTher | Objective::CohPlusTherGamma => {
            let alpha = Complex64::new(mean_photon.sqrt(), 0.0);
            let d = spec.hilbert_dim;
            let model: Arc<dyn ParameterizedModel> = if spec.mix == 1.0 {
                Arc::new(CoherentPhaseModel::new(alpha, d)?)
            } else {
                Arc::new(CoherentThermalModel::with_matched_occupation(alpha, spec.mix, d)?)
            };
            let prior = if spec.objective == Objective::CohPlusTher {
                Prior::phase_gaussian()
            } else {
                Prior::gamma(4.0, 1.5)?
            };
            (model, AnsatzFamily::coherent(alpha, d)?, prior)
        }
    };
    let (cost, reference) = match spec.cost {
        CostArg::VanTrees => {
            let reference = spec.is_qubit().then(|| 1.0 - eta.cos().abs());
            (
                CostFunction::van_trees(model, prior, QuadratureSpec::default()),
                reference,
            )
        }
        CostArg::Fisher => {
            let reference = spec.is_qubit().then(|| eta.sin().powi(2));
            (CostFunction::fisher_at(model, spec.theta0), reference)
        }
    };
    Ok(Problem {
        cost: Arc::new(cost),
        family,
        reference,
    })
}

fn config(spec: &RunSpec, cost: Arc<CostFunction>) -> SearchConfig {
    SearchConfig::new(cost, spec.method.into(), spec.outcome_dim, spec.samples, spec.seed).with_workers(spec.workers)
}

fn indexed(path: &Path, k: usize, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{k:03}.{ext}"),
        None => format!("{stem}_{k:03}"),
    };
    path.with_file_name(name)
}

fn write_povm(path: &Path, p: &Povm) -> Result<(), CliError> {
    fs::write(path, p.to_json_string()?)?;
    Ok(())
}

fn write_trace(path: &Path, result: &SearchResult, reference: Option<f64>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "sample", "seconds", "best_value", "error"])?;
    for tp in &result.trace {
        let best = tp.best_value.map(|v| v.to_string()).unwrap_or_default();
        let err = match (reference, tp.best_value) {
            (Some(r), Some(v)) => (r - v).to_string(),
            _ => String::new(),
        };
        w.write_record([
            result.method.to_string(),
            tp.sample.to_string(),
            tp.seconds.to_string(),
            best,
            err,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_results(spec: &RunSpec, rows: &[ResultRow], dir: &Path) -> Result<PathBuf, CliError> {
    let var = spec.sweep_variable();
    match spec.format {
        Format::Csv => {
            let path = dir.join("result.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record([
                var,
                "value",
                "fisher_term",
                "prior_term",
                "ansatz_xi",
                "ansatz_value",
                "best_sample",
                "failed_samples",
                "capped_outcomes",
            ])?;
            for r in rows {
                w.write_record([
                    r.sweep_value.to_string(),
                    r.value.to_string(),
                    r.fisher_term.to_string(),
                    r.prior_term.to_string(),
                    r.ansatz_xi.to_string(),
                    r.ansatz_value.to_string(),
                    r.best_sample.map(|s| s.to_string()).unwrap_or_default(),
                    r.failed_samples.to_string(),
                    r.capped_outcomes.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join("result.json");
            let records: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("plain record");
                    let obj = v.as_object_mut().expect("struct serializes to object");
                    let x = obj.remove("sweep_value").expect("field present");
                    obj.insert(var.to_string(), x);
                    v
                })
                .collect();
            fs::write(&path, serde_json::to_string_pretty(&records)?)?;
            Ok(path)
        }
    }
}

fn write_benchmark(report: &BenchmarkReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let csv_path = dir.join("benchmark.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["method", "sample", "seconds", "best_value", "error"])?;
    for r in &report.rows {
        w.write_record([
            r.method.to_string(),
            r.budget.to_string(),
            r.seconds.to_string(),
            r.best_value.to_string(),
            r.error.map(|e| e.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let json_path = dir.join("benchmark.json");
    fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    Ok(vec![csv_path, json_path])
}

/// Runs a validated spec and writes its data files under `spec.out`.
pub fn execute(spec: &RunSpec) -> Result<RunOutput, CliError> {
    spec.validate()?;
    let dir = &spec.out;
    fs::create_dir_all(dir)?;
    let xs = spec.sweep_values();
    let many = xs.len() > 1;
    let loaded = match &spec.load_povm {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            Some(Povm::from_json_str(&text).map_err(|e| CliError::InvalidFlag {
                flag: "--load-povm",
                message: e.to_string(),
            })?)
        }
        None => None,
    };

    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    let mut bench = None;
    let grid = uniform_grid(spec.xi_grid);

    for (k, &x) in xs.iter().enumerate() {
        let prob = problem(spec, x)?;
        points.push(PointMeta {
            sweep_value: x,
            model: prob.cost.model().descriptor(),
            cost: prob.cost.kind().clone(),
            reference: prob.reference,
        });
        let ansatz = ansatz_scan(&prob.family, &prob.cost, &grid)?;

        if let Some(budgets) = &spec.benchmark {
            let base = config(spec, prob.cost.clone());
            let cfgs = [
                base.clone().with_method(resm::Method::Rsm),
                base.with_method(resm::Method::Resm),
            ];
            let report = benchmark(&cfgs, budgets, prob.reference)?;
            files.extend(write_benchmark(&report, dir)?);
            let best = report
                .winners
                .iter()
                .max_by(|a, b| a.best_value.total_cmp(&b.best_value))
                .expect("two configurations");
            let cost = prob.cost.evaluate(&best.povm.clone().into_povm()?)?;
            rows.push(ResultRow {
                sweep_value: x,
                value: cost.value,
                fisher_term: cost.fisher_term,
                prior_term: cost.prior_term,
                ansatz_xi: ansatz.xi,
                ansatz_value: ansatz.cost.value,
                best_sample: None,
                failed_samples: 0,
                capped_outcomes: cost.flags.capped_outcomes,
            });
            bench = Some(report);
            continue;
        }

        let (cost, best_povm, best_sample, failed, capped) = match &loaded {
            Some(p) => {
                let c = prob.cost.evaluate(p)?;
                (c, p.clone(), None, 0, c.flags.capped_outcomes)
            }
            None => {
                let result = search(&config(spec, prob.cost.clone()))
                    .map_err(|e| CliError::Numerical(format!("{} = {x}: {e}", spec.sweep_variable())))?;
                let trace = dir.join(indexed(Path::new("trace.csv"), k, many));
                write_trace(&trace, &result, prob.reference)?;
                files.push(trace);
                for f in &result.flags.failures {
                    warnings.push(format!(
                        "{} = {x}, sample {}: {}",
                        spec.sweep_variable(),
                        f.sample,
                        f.message
                    ));
                }
                (
                    result.best_cost,
                    result.best_povm,
                    Some(result.best_sample),
                    result.flags.failed_samples,
                    result.flags.capped_outcomes,
                )
            }
        };
        let povm_path = dir.join(indexed(Path::new("best_povm.json"), k, many));
        write_povm(&povm_path, &best_povm)?;
        files.push(povm_path);
        if let Some(dump) = &spec.dump_povm {
            let path = indexed(dump, k, many);
            write_povm(&path, &best_povm)?;
            files.push(path);
        }
        rows.push(ResultRow {
            sweep_value: x,
            value: cost.value,
            fisher_term: cost.fisher_term,
            prior_term: cost.prior_term,
            ansatz_xi: ansatz.xi,
            ansatz_value: ansatz.cost.value,
            best_sample,
            failed_samples: failed,
            capped_outcomes: capped,
        });
    }

    files.push(write_results(spec, &rows, dir)?);
    let meta = Meta {
        library_version: resm::VERSION,
        cli_version: env!("CARGO_PKG_VERSION"),
        spec,
        sweep_variable: spec.sweep_variable(),
        points,
    };
    let meta_path = dir.join("meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    files.push(meta_path);
    Ok(RunOutput {
        rows,
        benchmark: bench,
        files,
        warnings,
    })
}
