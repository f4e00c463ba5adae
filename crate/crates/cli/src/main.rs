//! `ikwave`: batch front end for dispersion tables, initial data and runs.
//!
//! Exit codes: 0 ok, 1 i/o failure, 2 configuration error, 3 solver failure,
//! 4 guard abort.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ikwave_core::scenario::PRESETS;

use commands::{DispersionArgs, RunArgs, ScenarioArgs};

#[derive(Parser)]
#[command(
    name = "ikwave",
    version,
    about = "Pseudo-spectral laboratory for the Isobe-Kakinuma water-wave model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioFlags {
    /// JSON scenario file, or a manifest.json from an earlier run.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// Seed for randomized initial fields.
    #[arg(long)]
    seed: Option<u64>,
    /// Parabolic regularization parameter.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl ScenarioFlags {
    fn as_args(&self) -> ScenarioArgs<'_> {
        ScenarioArgs {
            config: self.config.as_deref(),
            preset: self.preset.as_deref(),
            seed: self.seed,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the linear phase speed against the exact and Pade curves.
    Dispersion {
        /// Exponents p_0 < ... < p_N, comma separated, starting at 0.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u32>,
        #[arg(long, default_value_t = 2.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Fit the small-mu error exponent.
        #[arg(long)]
        fit: bool,
        /// Output directory; the CSV goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct compatible initial data and write it with a residual report.
    Init {
        #[command(flatten)]
        scenario: ScenarioFlags,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Integrate a scenario and write diagnostics.
    Run {
        #[command(flatten)]
        scenario: ScenarioFlags,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write a binary state snapshot at every diagnostics record.
        #[arg(long)]
        snapshots: bool,
    },
    /// Summarize a diagnostics CSV.
    Analyze {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Dispersion {
            p,
            mu_max,
            points,
            fit,
            out,
        } => commands::dispersion(&DispersionArgs {
            p,
            mu_max: *mu_max,
            points: *points,
            fit: *fit,
            out: out.as_deref(),
        }),
        Command::Init { scenario, out } => commands::init(&scenario.as_args(), out),
        Command::Run {
            scenario,
            out,
            snapshots,
        } => commands::run(&RunArgs {
            scenario: scenario.as_args(),
            out,
            snapshots: *snapshots,
        }),
        Command::Analyze { csv, out } => commands::analyze(csv, out.as_ref()),
    };
    match result {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ikwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
