mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Usage};

/// Bad flags or a state/channel/method combination with no meaning.
pub const EXIT_USAGE: u8 = 2;
/// A computed result fell outside the requested tolerance.
pub const EXIT_TOLERANCE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Wigner(a) => commands::wigner(a),
        Command::Pnd(a) => commands::pnd(a),
        Command::Tc(a) => commands::tc(a),
        Command::Verify(a) => commands::verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_TOLERANCE),
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    use wigner_core::Error::*;
    e.downcast_ref::<Usage>().is_some()
        || matches!(
            e.downcast_ref::<wigner_core::Error>(),
            Some(InvalidState(_) | InvalidChannel(_) | Refused(_))
        )
}
