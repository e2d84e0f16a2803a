//! `nilwalk`: experiments on conjugacy-invariant random walks on U_n(p).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 capacity or precision error.

mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{duplicate_flags, ConfigArgs, ExperimentConfig, Format};
use crate::report::{destination, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "nilwalk", version, about, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Heat-kernel distance profile on an enumerated group
    #[command(args_override_self = true)]
    Exact(ConfigArgs),
    /// Product-chain profile, cutoff time and comparison bounds
    #[command(args_override_self = true)]
    Spectral(ConfigArgs),
    /// Monte Carlo collision and TV estimates
    #[command(args_override_self = true)]
    Mc(ConfigArgs),
    /// Exact verification runs
    #[command(subcommand, arg_required_else_help = true)]
    Verify(VerifyCommand),
    /// Distance profiles around the cutoff time
    #[command(subcommand, arg_required_else_help = true)]
    Profile(ProfileCommand),
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Check lower ≤ exact ≤ upper for each ε
    #[command(args_override_self = true)]
    Theorem1(ConfigArgs),
    /// Exact counting checks of the structural lemmas
    #[command(args_override_self = true)]
    Lemmas(ConfigArgs),
}

#[derive(Debug, Subcommand)]
enum ProfileCommand {
    /// TV at c·t_n for each c
    #[command(args_override_self = true)]
    Cutoff(ConfigArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(nilwalk::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<nilwalk::Error> for CliError {
    fn from(e: nilwalk::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_error() => 3,
            _ => 2,
        }
    }
}

fn run(command: Command) -> Result<(commands::Outcome, ExperimentConfig, &'static str), CliError> {
    let (name, args, body): (&'static str, ConfigArgs, fn(&ExperimentConfig) -> Result<commands::Outcome, CliError>) =
        match command {
            Command::Exact(a) => ("exact", a, commands::exact),
            Command::Spectral(a) => ("spectral", a, commands::spectral),
            Command::Mc(a) => ("mc", a, commands::mc),
            Command::Verify(VerifyCommand::Theorem1(a)) => ("verify-theorem1", a, commands::verify_theorem1),
            Command::Verify(VerifyCommand::Lemmas(a)) => ("verify-lemmas", a, commands::verify_lemmas),
            Command::Profile(ProfileCommand::Cutoff(a)) => ("profile-cutoff", a, commands::profile_cutoff),
        };
    let cfg = ExperimentConfig::resolve(&args)?;
    Ok((body(&cfg)?, cfg, name))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    for d in duplicate_flags(argv.get(1..).unwrap_or_default()) {
        eprintln!("warning: --{d} given more than once; using the last value");
    }
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    let start = Instant::now();
    let (mut outcome, cfg, name) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    outcome.report.wall_clock_seconds = start.elapsed().as_secs_f64();
    // verification reports default to JSON, profiles to CSV
    let format = match cfg.format {
        Some(f) => f,
        None if name.starts_with("verify") => Format::Json,
        None => cfg.format(),
    };
    let text = outcome.report.render(format);
    match destination(&cfg, name, format) {
        Some(path) => {
            if let Err(e) = write_atomic(&path, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
        }
        None => print!("{text}"),
    }
    match outcome.failure {
        Some(f) => {
            eprintln!("verification failed: {f}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
