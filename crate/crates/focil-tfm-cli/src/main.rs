//! Command-line front end: scenario files in, deterministic reports out.

mod commands;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::report::RunReport;

#[derive(Parser)]
#[command(
    name = "focil-tfm-cli",
    version,
    about = "Property checks and censorship economics for fee mechanisms with inclusion lists"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs property checks on a scenario file or a directory of them.
    Check {
        /// Scenario file, or directory holding one scenario per .json file.
        input: PathBuf,
        /// Comma-separated property names; empty means each mechanism's
        /// default set.
        #[arg(long, value_delimiter = ',')]
        properties: Vec<String>,
        /// Worker threads for directory batches; 0 means one per core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Counts hypothesis-gated inconclusive verdicts as inconclusive
        /// instead of clean.
        #[arg(long)]
        strict_inconclusive: bool,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Computes the minimum omission bribes for a scenario's target.
    Minbribe {
        /// Scenario file.
        input: PathBuf,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimizes the single-bid fee split for one market.
    Optz {
        /// The target transaction's per-unit cap, as a rational.
        #[arg(long)]
        cap: String,
        /// The per-unit burn rate, as a rational.
        #[arg(long)]
        burn: String,
        /// The committee size.
        #[arg(long)]
        includers: u32,
        /// The transaction size, as a rational.
        #[arg(long, default_value = "1")]
        size: String,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates the plant-free bribery predicates and audits them by full
    /// profile enumeration.
    Simplified {
        /// Plant-free market file.
        input: PathBuf,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes seed-reproducible scenario files.
    Generate {
        /// Generator seed; equal seeds give byte-identical files.
        #[arg(long)]
        seed: u64,
        /// Mechanism: double, single, or single-prioritized.
        #[arg(long, default_value = "double")]
        tfm: String,
        /// Family: dsic, bribery, congested, or sp-congested.
        #[arg(long, default_value = "bribery")]
        regime: String,
        /// How many scenarios to write.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Emits plant-free markets instead of full scenarios.
        #[arg(long)]
        simplified: bool,
        /// Destination directory, or a single .json path when count is 1.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (report, outcome, destination) = match cli.command {
        Command::Check {
            input,
            properties,
            jobs,
            strict_inconclusive,
            out,
        } => {
            let (report, outcome) =
                commands::cmd_check(&input, &properties, jobs, strict_inconclusive)?;
            (report, outcome, out)
        }
        Command::Minbribe { input, out } => {
            let (report, outcome) = commands::cmd_minbribe(&input)?;
            (report, outcome, out)
        }
        Command::Optz {
            cap,
            burn,
            includers,
            size,
            out,
        } => {
            let (report, outcome) = commands::cmd_optz(&cap, &burn, includers, &size)?;
            (report, outcome, out)
        }
        Command::Simplified { input, out } => {
            let (report, outcome) = commands::cmd_simplified(&input)?;
            (report, outcome, out)
        }
        Command::Generate {
            seed,
            tfm,
            regime,
            count,
            simplified,
            out,
        } => {
            let (report, outcome) =
                commands::cmd_generate(seed, &tfm, &regime, count, simplified, &out)?;
            (report, outcome, None)
        }
    };
    emit(&report, destination)?;
    Ok(ExitCode::from(outcome.exit_code()))
}

/// Writes the canonical report to the chosen destination.
fn emit(report: &RunReport, destination: Option<PathBuf>) -> Result<()> {
    let text = report.canonical();
    match destination {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("cannot write the report to {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
