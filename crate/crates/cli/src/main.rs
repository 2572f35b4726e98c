//! `platelimit`: limit analysis runs from JSON configuration files.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use commands::{CliError, Levels, OutputDir};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "platelimit", version, about = "Upper-bound limit analysis of thin plates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Directory for result files; relative output paths resolve here.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Overrides the configured primal/dual feasibility tolerance.
    #[arg(long)]
    tol_feas: Option<f64>,
    /// Overrides the configured relative gap tolerance.
    #[arg(long)]
    tol_gap: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and print the result record.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a sequence of meshes and write a CSV table and SVG plot.
    #[command(group(ArgGroup::new("schedule").required(true).args(["levels", "h"])))]
    Convergence {
        config: PathBuf,
        /// Number of levels: the configured mesh and its refinements.
        #[arg(long)]
        levels: Option<usize>,
        /// Cell sizes of structured meshes, in units of the normalization length.
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        /// Levels solved concurrently.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Record solve times in the CSV (makes it nondeterministic).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the oracle suites.
    Selftest {
        #[arg(long, default_value_t = 20240521)]
        seed: u64,
        /// Check the criterion of this configuration instead of the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the assembled conic program in the ASCII dump format.
    DumpConic { config: PathBuf, out: PathBuf },
}

fn load(path: &Path, common: Option<&Common>) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::from_path(path)?;
    if let Some(c) = common {
        if let Some(t) = c.tol_feas {
            config.solver.tol_feas = t;
        }
        if let Some(t) = c.tol_gap {
            config.solver.tol_gap = t;
        }
        if !(config.solver.tol_feas > 0.0 && config.solver.tol_gap > 0.0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { config, common } => {
            let config = load(&config, Some(&common))?;
            commands::solve(&config, &OutputDir::create(&common.output_dir)?)
        }
        Command::Convergence {
            config,
            levels,
            h,
            threads,
            timings,
            common,
        } => {
            let config = load(&config, Some(&common))?;
            let schedule = match (levels, h) {
                (Some(n), _) => Levels::Count(n),
                (None, Some(h)) => Levels::Sizes(h),
                (None, None) => unreachable!("clap requires a schedule"),
            };
            commands::convergence(
                &config,
                &schedule,
                threads.max(1),
                timings,
                &OutputDir::create(&common.output_dir)?,
            )
        }
        Command::Selftest { seed, config } => {
            let config = config.map(|p| load(&p, None)).transpose()?;
            commands::selftest(seed, config.as_ref())
        }
        Command::DumpConic { config, out } => commands::dump_conic(&load(&config, None)?, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
