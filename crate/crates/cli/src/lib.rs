//! Command-line driver and experiment harness for `rsbm`.

pub mod args;
pub mod commands;
pub mod error;
pub mod experiment;

use args::{Cli, Command};
use error::Result;

/// Version tag of every JSON document the CLI prints.
pub const SCHEMA_VERSION: &str = "rsbm/1";

/// Runs one subcommand and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Recover(a) => commands::recover(a),
        Command::Experiment(a) => experiment::run_file(&a.config, a.jobs),
        Command::Verify(a) => commands::verify(a),
        Command::Formulas(a) => commands::formulas(a),
        Command::Spectrum(a) => commands::spectrum(a),
    }
}
