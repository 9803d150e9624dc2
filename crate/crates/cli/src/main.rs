//! `chi-mhd`: runs, Picard solves, verification suites, weak-strong twin runs
//! and parameter sweeps of the 2D MHD laboratory.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use chi_mhd::verification::calibration::RUN_DELTA;
use clap::{Args, Parser, Subcommand};

use crate::commands::Common;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "chi-mhd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat TOML configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed or inclusive range `A..B`.
    #[arg(long)]
    seeds: Option<String>,
    /// Initial data: taylor-green, aligned, random-beta or zero.
    #[arg(long)]
    preset: Option<String>,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            out: a.out,
            seeds: a.seeds,
            preset: a.preset,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run and write norms, checkpoint and summary.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Use the frequency-splitting continuation solver.
        #[arg(long)]
        continuation: bool,
    },
    /// Solve the integral form by Picard iteration.
    Picard {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a verification suite over a seed range (default 0..99) at the
    /// configured resolution.
    Verify {
        /// lemmas, theorem1, theorem2 or all.
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Track the stability envelope between a run and a perturbed twin.
    Weakstrong {
        #[command(flatten)]
        common: CommonArgs,
        /// Size of the perturbation.
        #[arg(long, default_value_t = RUN_DELTA, allow_negative_numbers = true)]
        delta: f64,
    },
    /// Vary one configuration key over a list of values.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Configuration key to vary.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[arg(long)]
        continuation: bool,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("CHI_MHD_THREADS") else {
        return Ok(());
    };
    let n: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "CHI_MHD_THREADS must be a positive integer, got {text:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Simulate {
            common,
            continuation,
        } => commands::simulate(&common.into(), continuation),
        Command::Picard { common } => commands::picard(&common.into()),
        Command::Verify { suite, common } => commands::verify(&common.into(), &suite),
        Command::Weakstrong { common, delta } => commands::weakstrong(&common.into(), delta),
        Command::Sweep {
            common,
            param,
            values,
            continuation,
        } => commands::sweep(&common.into(), &param, &values, continuation),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chi-mhd: {e}");
            e.exit_code()
        }
    }
}
