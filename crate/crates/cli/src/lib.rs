//! Command-line front end: experiment specs, runs and their data files.

mod error;
mod run;
mod spec;

pub use error::CliError;
pub use run::{execute, ResultRow, RunOutput};
pub use spec::{CostArg, Format, MethodArg, Objective, RunSpec, Sweep};
