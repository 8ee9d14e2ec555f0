//! `b2disc`: batch driver writing JSON reports and CSV grids.
//!
//! Exit status: 0 on success, 2 when a result is divergent or
//! inconclusive, 1 on invalid input or I/O failure.

mod commands;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{Command, Status};
use report::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "b2disc", version, about = "B₂ weights, Bloch functions and Cesàro spectra on the unit disc")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "B2DISC_JOBS", global = true)]
    jobs: Option<usize>,
    /// JSON report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV grid path, for commands that produce one.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Top,
}

#[derive(Debug, Subcommand)]
enum Top {
    /// Runs an experiment from a JSON config (the `config` block of a report).
    Run { config: PathBuf },
    #[command(flatten)]
    Experiment(Command),
}

fn resolve(cli: Cli) -> Result<ExperimentConfig> {
    let mut config = match cli.command {
        Top::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("config: cannot read {}", config.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("config: {}", config.display()))?
        }
        Top::Experiment(experiment) => ExperimentConfig { jobs: None, out: None, csv: None, experiment },
    };
    config.jobs = cli.jobs.or(config.jobs);
    config.out = cli.out.or(config.out);
    config.csv = cli.csv.or(config.csv);
    Ok(config)
}

fn execute(config: &ExperimentConfig) -> Result<Status> {
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            anyhow::bail!("jobs: need at least one worker");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().context("jobs")?;
    }
    let outcome = commands::run(&config.experiment)?;
    report::write(config, &outcome)?;
    Ok(outcome.status)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    // a weight outside B₂ for every tested exponent is a mathematical verdict
    match err.downcast_ref::<b2disc::Error>() {
        Some(b2disc::Error::NotB2(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = resolve(cli).and_then(|config| execute(&config));
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(status) => {
            eprintln!("b2disc: result is {}", serde_json::to_string(&status).unwrap_or_default().trim_matches('"'));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("b2disc: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
