use std::process::ExitCode;

use clap::Parser;
use resm_cli::{execute, RunSpec};

fn main() -> ExitCode {
    let spec = RunSpec::parse();
    match execute(&spec) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let var = spec.sweep_variable();
            for r in &out.rows {
                println!(
                    "{var}={} value={} fisher_term={} prior_term={} ansatz_value={}",
                    r.sweep_value, r.value, r.fisher_term, r.prior_term, r.ansatz_value
                );
            }
            if let Some(b) = &out.benchmark {
                for s in &b.slopes {
                    match s.slope {
                        Some(v) => println!("{} slope={v}", s.method),
                        None => println!("{} slope=none", s.method),
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
