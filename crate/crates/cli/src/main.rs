use std::process::ExitCode;

use clap::Parser;
use rsbm_cli::args::{Cli, Command};
use rsbm_cli::error::EXIT_OK;
use rsbm_cli::SCHEMA_VERSION;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match rsbm_cli::run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            if matches!(cli.command, Command::Recover(_)) {
                let report = serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "recover",
                    "error": { "kind": e.kind(), "message": e.to_string() },
                });
                println!("{report}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
