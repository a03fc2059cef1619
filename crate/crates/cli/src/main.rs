//! `gls`: experiment runner for the group large-sieve toolkit.
//!
//! Exit codes: 0 success, 1 computation error or failed sieve conditions,
//! 2 configuration error, 3 a measured quantity violates its bound,
//! 4 resource budget exceeded.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Verdict;
use config::{Command, ExperimentConfig, Overrides, SEED_ENV};
use error::{exit, CliError};

#[derive(Parser)]
#[command(
    name = "gls",
    version,
    about = "Group large-sieve experiments on SL2(Z)"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Power census of SL2(F_p), or of cosets with --coset (CSV).
    Census(Overrides),
    /// Cayley graph spectra per modulus with the eigenvalue floor (CSV).
    Spectral(Overrides),
    /// Monte Carlo event probabilities along a step grid (CSV).
    Walk(Overrides),
    /// Sieve certification report for a prime family (JSON).
    Sieve(Overrides),
    /// Every checked inequality of the sieve certification (CSV).
    Certify(Overrides),
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let (command, flags) = match cli.command {
        Sub::Census(f) => (Command::Census, f),
        Sub::Spectral(f) => (Command::Spectral, f),
        Sub::Walk(f) => (Command::Walk, f),
        Sub::Sieve(f) => (Command::Sieve, f),
        Sub::Certify(f) => (Command::Certify, f),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = ExperimentConfig::resolve(command, &flags, env_seed.as_deref())?;
    match command {
        Command::Census => commands::census::run(&cfg),
        Command::Spectral => commands::spectral::run(&cfg),
        Command::Walk => commands::walk::run(&cfg),
        Command::Sieve => commands::sieve::run(&cfg),
        Command::Certify => commands::certify::run(&cfg),
    }
}

/// Maps a finished run to its exit code, reporting findings on stderr.
fn exit_code(result: &Result<Verdict, CliError>) -> i32 {
    match result {
        Ok(v) if !v.violations.is_empty() => {
            for msg in &v.violations {
                eprintln!("gls: bound violated: {msg}");
            }
            exit::BOUND_VIOLATED
        }
        Ok(v) if !v.failed_conditions.is_empty() => {
            eprintln!("gls: conditions failed: {}", v.failed_conditions.join(", "));
            exit::FAILURE
        }
        Ok(_) => exit::OK,
        Err(e) => {
            eprintln!("gls: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(exit_code(&run(Cli::parse())) as u8)
}
