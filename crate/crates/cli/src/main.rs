use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use qig_cli::{parse_tolerance, run, CliError, Command, RunConfig};

/// Numerical experiments on the manifold of invertible density matrices.
#[derive(Debug, Parser)]
#[command(name = "qig", version)]
struct Args {
    command: Command,

    /// Hilbert-space dimension N.
    #[arg(long, default_value_t = 2)]
    dim: usize,

    /// Sample points (per-command default when omitted).
    #[arg(long)]
    samples: Option<usize>,

    /// Trials per function for `monotonicity`.
    #[arg(long, default_value_t = 200)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated function names, e.g. `bkm,2*bkm,sld`.
    #[arg(long = "f", value_delimiter = ',')]
    functions: Vec<String>,

    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tolerance", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the witness table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("QIG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("QIG_THREADS must be a non-negative integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .context("configuring the thread pool")
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<CliError>().is_some_and(|c| matches!(c, CliError::Usage(_)));
            ExitCode::from(if usage { 2 } else { 3 })
        }
    }
}

fn execute(args: Args) -> anyhow::Result<bool> {
    configure_threads()?;
    let config = RunConfig {
        command: args.command,
        dim: args.dim,
        samples: args.samples,
        trials: args.trials,
        seed: args.seed,
        functions: args.functions,
        tolerance_overrides: args.tolerances.into_iter().collect(),
    };
    let report = run(&config)?;
    match &args.out {
        Some(path) => report.write_json(path)?,
        None => println!("{}", report.to_json()),
    }
    if let Some(path) = &args.csv {
        report.write_csv(path)?;
    }
    for c in report.failures() {
        match &c.note {
            Some(note) => eprintln!("FAIL {}: {note}", c.name),
            None => eprintln!("FAIL {} = {:e} (required {} {:e})", c.name, c.value, c.comparison.symbol(), c.bound),
        }
    }
    eprintln!(
        "{}: {} checks, verdict {:?}, {:.2}s",
        report.command,
        report.checks.len(),
        report.verdict,
        report.wall_clock_seconds
    );
    Ok(report.passed())
}
