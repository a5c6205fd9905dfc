use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match qcc_cli::run(qcc_cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
