use std::process::ExitCode;

use clap::Parser;
use isocurve_cli::{commands, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isocurve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
