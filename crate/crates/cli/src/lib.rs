//! Experiment driver behind the `qig` binary.
//!
//! [`run`] dispatches a [`RunConfig`] to one experiment (or all of them) and
//! returns an [`ExperimentReport`]: a list of named checks against tolerances,
//! witnesses explaining each value, and a verdict that passes only if every
//! check does. An experiment that errors out is recorded as a failed check.

mod config;
mod experiments;
mod report;

use std::time::Instant;

pub use config::{default_tolerances, parse_tolerance, Command, ConfigEcho, RunConfig};
pub use report::{Check, Comparison, ExperimentReport, Verdict, WitnessRow, SCHEMA};

use experiments::{run_experiment, Collector};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot write {0}")]
    Io(String, #[source] std::io::Error),
    #[error("cannot write {0}")]
    Csv(String, #[source] csv::Error),
}

pub fn run(config: &RunConfig) -> Result<ExperimentReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let tolerances = config.tolerances();
    let commands: Vec<Command> = match config.command {
        Command::All => Command::EXPERIMENTS.to_vec(),
        c => vec![c],
    };

    let mut checks = Vec::new();
    let mut witnesses = std::collections::BTreeMap::new();
    let mut table = Vec::new();
    for command in commands {
        let mut out = Collector::new(command, &tolerances);
        if let Err(e) = run_experiment(command, config, &mut out) {
            out.error(e.to_string());
        }
        checks.append(&mut out.checks);
        witnesses.append(&mut out.witnesses);
        table.append(&mut out.table);
    }

    let verdict = if !checks.is_empty() && checks.iter().all(|c| c.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ExperimentReport {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        command: config.command,
        config: config.echo(),
        tolerances,
        checks,
        witnesses,
        witness_table: table,
        verdict,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
