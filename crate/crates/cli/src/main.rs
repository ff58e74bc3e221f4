//! `qoptics`: runs quantum-optics scenarios from a JSON config plus flag overrides.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or cutoff error,
//! 4 data-contract or I/O error.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::{Overrides, ScenarioConfig};
use qoptics::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qoptics", version, about = "Quantum-optics scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and write its photon statistics
    State(Overrides),
    /// Quasi-probability grid and marginals
    Wigner(Overrides),
    /// Sample a homodyne dataset and summarize its trace
    Homodyne(Overrides),
    /// Pattern-function estimates from a homodyne dataset
    Tomography(Overrides),
    /// Print the JSON schema of the scenario file
    Schema,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Json(_) | Error::InsufficientData(_) => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (o, f): (Overrides, fn(&ScenarioConfig) -> qoptics::Result<Vec<std::path::PathBuf>>) = match cli.command {
        Command::Schema => {
            print!("{}", config::SCHEMA);
            return Ok(());
        }
        Command::State(o) => (o, commands::state),
        Command::Wigner(o) => (o, commands::wigner),
        Command::Homodyne(o) => (o, commands::homodyne),
        Command::Tomography(o) => (o, commands::tomography),
    };
    let cfg = ScenarioConfig::resolve(&o)?;
    for path in f(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
