//! `levyito`: simulate Lévy paths, run the verification battery, recover a
//! triplet from its exponent.
//!
//! Exit codes: 0 pass, 1 check failure, 2 inconclusive, 64 usage, 65
//! invalid data.

mod checks;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Overrides;
use crate::error::{CliResult, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "levyito", version, about = "Lévy processes from their triplets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample paths; full CSVs for up to 16 replicates, terminal values above.
    Simulate(Args),
    /// Simulate replicates and run the selected checks.
    Verify(Args),
    /// Recover (a, σ², ν) from a triplet's exponent or a tabulated ψ.
    Recover(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated check names.
    #[arg(long)]
    checks: Option<String>,
    /// Replicate count N.
    #[arg(long)]
    replicates: Option<usize>,
}

fn run(cli: Cli) -> CliResult<u8> {
    let (args, cmd): (Args, fn(&config::Loaded) -> CliResult<u8>) = match cli.command {
        Command::Simulate(a) => (a, commands::simulate),
        Command::Verify(a) => (a, commands::verify),
        Command::Recover(a) => (a, commands::recover),
    };
    let loaded = config::load(
        &args.config,
        Overrides {
            seed: args.seed,
            out: args.out,
            checks: args.checks,
            replicates: args.replicates,
        },
    )?;
    cmd(&loaded)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("levyito: {e}");
            ExitCode::from(e.code)
        }
    }
}
