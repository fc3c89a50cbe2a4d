//! `spitefree`: exhaustive spite-freeness checks, characterization
//! enumeration, optimal thresholds, revenue sampling and multi-item region
//! geometry from the command line.
//!
//! All checks range over finite grids: a PASS certifies the property against
//! deviations to grid levels, not against every real-valued bid.
//!
//! Exit status: 0 pass, 1 property failure, 2 input error, 3 budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spitefree_cli::commands;
use spitefree_cli::error::{self, CliError, EXIT_PASS, EXIT_PROPERTY_FAIL};
use spitefree_cli::report::{Report, RunConfig};

#[derive(Parser)]
#[command(name = "spitefree", version, about = "Spite-free mechanism verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check properties of a single-item mechanism on a grid.
    Verify(RunArgs),
    /// Enumerate every IR and IC two-agent mechanism on a grid and compare
    /// SIC with threshold form.
    Enumerate(RunArgs),
    /// Exact revenue-optimal thresholds for uniform values.
    Thresholds(RunArgs),
    /// Monte Carlo revenue of the optimal thresholds.
    Revenue(RunArgs),
    /// Bundle-choice regions for given bundle prices.
    Regions(RunArgs),
    /// Check a multi-item mechanism over a finite bid domain.
    Multi(RunArgs),
    /// Re-run the configuration echoed in a JSON report.
    Rerun {
        report: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Mechanism spec file (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Comma-separated rational grid levels, e.g. "0,1/2,1".
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated property names (IR, IC, SIC, ESIC, ANON, EFF, ...).
    #[arg(long, value_delimiter = ',')]
    props: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    samples: Option<u64>,
    /// Maximum work (profiles times deviations, candidates, samples or lattice points).
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Lattice bounding box "lo,hi", applied to every item axis.
    #[arg(long = "box")]
    bbox: Option<String>,
    /// Lattice step, e.g. "1/2".
    #[arg(long)]
    step: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn config(command: &str, a: &RunArgs) -> Result<RunConfig, CliError> {
    let spec = a.spec.as_ref().map(read).transpose()?;
    Ok(RunConfig {
        command: command.to_string(),
        spec_path: a.spec.as_ref().map(|p| p.display().to_string()),
        spec,
        grid: a.grid.clone(),
        n: a.n,
        props: a.props.clone(),
        seed: a.seed,
        samples: a.samples,
        budget: a.budget,
        bbox: a.bbox.clone(),
        step: a.step.clone(),
    })
}

fn emit(report: &Report, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (cfg, output) = match &cli.command {
        Command::Verify(a) => (config("verify", a)?, a.output.clone()),
        Command::Enumerate(a) => (config("enumerate", a)?, a.output.clone()),
        Command::Thresholds(a) => (config("thresholds", a)?, a.output.clone()),
        Command::Revenue(a) => (config("revenue", a)?, a.output.clone()),
        Command::Regions(a) => (config("regions", a)?, a.output.clone()),
        Command::Multi(a) => (config("multi", a)?, a.output.clone()),
        Command::Rerun { report, output } => {
            let old: Report = serde_json::from_str(&read(report)?)
                .map_err(|e| CliError::Input(format!("report {}: {e}", report.display())))?;
            (old.config, output.clone())
        }
    };
    let report = commands::run(&cfg)?;
    emit(&report, &output)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_INPUT } else { EXIT_PASS });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_PROPERTY_FAIL),
        Err(e) => {
            eprintln!("spitefree: {e}");
            e.exit_code()
        }
    }
}
