use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Objective {
    /// Qubit phase model, uniform prior on the circle.
    #[value(name = "Qubit")]
    Qubit,
    /// Coherent (plus thermal) state, trimmed Gaussian prior.
    #[value(name = "CohPlusTher")]
    CohPlusTher,
    /// Coherent (plus thermal) state, Gamma(4, 1.5) prior.
    #[value(name = "CohPlusTherGamma")]
    CohPlusTherGamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MethodArg {
    #[value(name = "RESM", alias = "resm")]
    #[serde(rename = "RESM")]
    Resm,
    #[value(name = "RSM", alias = "rsm")]
    #[serde(rename = "RSM")]
    Rsm,
}

impl From<MethodArg> for resm::Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Resm => resm::Method::Resm,
            MethodArg::Rsm => resm::Method::Rsm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostArg {
    /// Prior-averaged Fisher information plus the prior's Fisher information.
    VanTrees,
    /// Fisher information at `--theta0`.
    Fisher,
}

/// `start:stop:count`, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err("expected start:stop:count".into());
        };
        let start: f64 = start.trim().parse().map_err(|e| format!("start: {e}"))?;
        let stop: f64 = stop.trim().parse().map_err(|e| format!("stop: {e}"))?;
        let count: usize = count.trim().parse().map_err(|e| format!("count: {e}"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err("start and stop must be finite".into());
        }
        if count == 0 {
            return Err("count must be at least 1".into());
        }
        Ok(Sweep { start, stop, count })
    }
}

/// A complete run description. Flag spellings follow the original experiment
/// scripts.
#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "resm", version, about = "Search for optimal phase-estimation measurements")]
pub struct RunSpec {
    /// Experiment to run.
    #[arg(short = 'o', value_enum, default_value_t = Objective::Qubit)]
    pub objective: Objective,

    /// Qubit weight angle η in [0, π].
    #[arg(long = "EtaAngle", default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub eta: f64,

    /// Dimensionless temperature; recorded only, the thermal occupation is |α|².
    #[arg(short = 'T', default_value_t = 0.001, allow_negative_numbers = true)]
    pub temperature: f64,

    /// Weight of the coherent component; 1 selects the pure coherent state.
    #[arg(long = "MixConstant", default_value_t = 0.5, allow_negative_numbers = true)]
    pub mix: f64,

    /// Number of random POVMs to sample.
    #[arg(short = 's', default_value_t = 150)]
    pub samples: usize,

    /// Fock-space truncation for the oscillator experiments.
    #[arg(long = "HilbertDim", default_value_t = 7)]
    pub hilbert_dim: usize,

    /// Outcomes of each random POVM.
    #[arg(long = "Outcomedim", default_value_t = 10)]
    pub outcome_dim: usize,

    /// |α|² of the probe coherent state.
    #[arg(long = "MeanPhotonNumb", default_value_t = 1.0, allow_negative_numbers = true)]
    pub mean_photon: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Format of the result table.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads, 0 for all available. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,

    #[arg(long, value_enum, default_value_t = MethodArg::Resm)]
    pub method: MethodArg,

    #[arg(long, value_enum, default_value_t = CostArg::VanTrees)]
    pub cost: CostArg,

    /// Parameter value for `--cost fisher`.
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub theta0: f64,

    /// Sweep `--EtaAngle` (Qubit) or `--MeanPhotonNumb` (oscillator) over
    /// `start:stop:count`.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<Sweep>,

    /// Points of the two-outcome ansatz scan over [0, 2π).
    #[arg(long, default_value_t = 256)]
    pub xi_grid: usize,

    /// Also write the best POVM as JSON to this path.
    #[arg(long)]
    pub dump_povm: Option<PathBuf>,

    /// Evaluate this POVM (JSON) instead of searching.
    #[arg(long, conflicts_with = "benchmark")]
    pub load_povm: Option<PathBuf>,

    /// Compare RSM and RESM at these comma-separated sample budgets.
    #[arg(long, value_delimiter = ',', conflicts_with = "sweep")]
    pub benchmark: Option<Vec<usize>>,
}

fn invalid(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::InvalidFlag {
        flag,
        message: message.into(),
    }
}

impl RunSpec {
    pub fn is_qubit(&self) -> bool {
        self.objective == Objective::Qubit
    }

    /// Name of the swept quantity; also the first result column.
    pub fn sweep_variable(&self) -> &'static str {
        if self.is_qubit() {
            "eta"
        } else {
            "mean_photon"
        }
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        match (&self.sweep, self.is_qubit()) {
            (Some(s), _) => s.values(),
            (None, true) => vec![self.eta],
            (None, false) => vec![self.mean_photon],
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let check_eta = |eta: f64, flag| {
            if !(0.0..=PI).contains(&eta) {
                return Err(invalid(flag, format!("η = {eta} is outside [0, π]")));
            }
            Ok(())
        };
        let check_photon = |n: f64, flag| {
            if !n.is_finite() || n < 0.0 {
                return Err(invalid(
                    flag,
                    format!("mean photon number {n} must be finite and non-negative"),
                ));
            }
            Ok(())
        };
        check_eta(self.eta, "--EtaAngle")?;
        check_photon(self.mean_photon, "--MeanPhotonNumb")?;
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(invalid("-T", "temperature must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.mix) {
            return Err(invalid("--MixConstant", format!("{} is outside [0, 1]", self.mix)));
        }
        if self.samples == 0 {
            return Err(invalid("-s", "at least one sample is required"));
        }
        if !self.is_qubit() && self.hilbert_dim < 2 {
            return Err(invalid("--HilbertDim", "the oscillator needs at least two levels"));
        }
        if self.outcome_dim == 0 {
            return Err(invalid("--Outcomedim", "at least one outcome is required"));
        }
        if !self.theta0.is_finite() {
            return Err(invalid("--theta0", "must be finite"));
        }
        if self.xi_grid == 0 {
            return Err(invalid("--xi-grid", "at least one grid point is required"));
        }
        if let Some(sweep) = &self.sweep {
            for v in sweep.values() {
                if self.is_qubit() {
                    check_eta(v, "--sweep")?;
                } else {
                    check_photon(v, "--sweep")?;
                }
            }
        }
        if let Some(budgets) = &self.benchmark {
            if budgets.is_empty() || budgets.contains(&0) {
                return Err(invalid(
                    "--benchmark",
                    "budgets must be a nonempty list of positive counts",
                ));
            }
        }
        Ok(())
    }
}
