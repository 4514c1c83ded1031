//! `pseudoform`: classify Pfaffians, analyse pseudo-surfaces and run the
//! Foucault pendulum from JSON configs.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;
use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "pseudoform",
    version,
    about = "Geometry of pseudo-surfaces and the Foucault pendulum"
)]
struct Cli {
    /// JSON config document for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; trajectories default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override a config field, e.g. `--set pendulum.length=67`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrability class of a Pfaffian over a box.
    Classify,
    /// Fundamental forms and curvatures at given points.
    Surface,
    /// Integrate a geodesic of a Pfaffian or level set.
    Geodesic,
    /// The Foucault pendulum.
    #[command(subcommand)]
    Foucault(FoucaultCommand),
    /// Teleparallel transport along the Foucault frame.
    Transport,
}

#[derive(Subcommand, Debug)]
enum FoucaultCommand {
    /// Frobenius form, fundamental forms and curvatures.
    Geometry,
    /// Simulate the pendulum.
    Sim,
    /// Simulate and measure the precession of the swing plane.
    Precession,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PSEUDOFORM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("PSEUDOFORM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let doc = config::load(cli.config.as_deref(), &cli.sets)?;
    let (report, default_format) = match cli.command {
        Command::Classify => (commands::classify_cmd(doc, cli.seed)?, Format::Json),
        Command::Surface => (commands::surface_cmd(doc)?, Format::Json),
        Command::Geodesic => (commands::geodesic_cmd(doc)?, Format::Csv),
        Command::Foucault(FoucaultCommand::Geometry) => (commands::foucault_geometry_cmd(doc)?, Format::Json),
        Command::Foucault(FoucaultCommand::Sim) => (commands::foucault_sim_cmd(doc)?, Format::Csv),
        Command::Foucault(FoucaultCommand::Precession) => (commands::foucault_precession_cmd(doc)?, Format::Csv),
        Command::Transport => (commands::transport_cmd(doc)?, Format::Csv),
    };
    output::emit(&report, cli.format.unwrap_or(default_format), cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pseudoform: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
