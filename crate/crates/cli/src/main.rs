mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes; part of the command-line contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Code {
    Ok = 0,
    Fails = 1,
    Invalid = 2,
    Inconclusive = 3,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Code::Invalid as u8 } else { Code::Ok as u8 });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(Code::Invalid as u8);
        }
    }
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::TheoremCheck(a) => commands::theorem_check(a),
        Command::Witness(a) => commands::witness(a),
        Command::Corpus(a) => commands::corpus(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Code::Invalid as u8)
        }
    }
}
