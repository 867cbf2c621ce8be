mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use fbpaug_core::Error;

use args::Cli;

/// Exit status for each error class.
fn exit_code(err: &anyhow::Error) -> u8 {
    let Some(core) = err.chain().find_map(|e| e.downcast_ref::<Error>()) else {
        return 1;
    };
    match core {
        Error::Io { .. } => 3,
        Error::BadMagic { .. } => 4,
        Error::Truncated { .. } => 5,
        Error::UnknownKind { .. } => 6,
        Error::BadHeader { .. } => 7,
        Error::Config(_) => 8,
        Error::InvalidParameter { .. } => 9,
        Error::InvalidImage(_) | Error::NonSquare { .. } | Error::DimensionMismatch { .. } => 10,
        Error::DegenerateTest(_) | Error::EmptyInput(_) => 11,
    }
}

fn one_line(err: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for e in err.chain() {
        let msg = e.to_string();
        // Wrapping errors often repeat their source's text already.
        if !parts.last().is_some_and(|p| p.ends_with(&msg)) {
            parts.push(msg);
        }
    }
    parts.join(": ").replace('\n', " ")
}

fn main() -> ExitCode {
    let cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    let argv = match config::expand(std::env::args_os().collect(), &cmd) {
        Ok(a) => a,
        Err(e) => {
            let e = anyhow::Error::new(e);
            eprintln!("fbpaug: error: {}", one_line(&e));
            return ExitCode::from(exit_code(&e));
        }
    };
    let matches = match cmd.try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid usage");
            eprintln!("fbpaug: {first}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fbpaug: error: {}", one_line(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
