mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use permuton_core::Error;

use args::Cli;

/// 1: semantic negative, 2: bad input, 3: precondition not met.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotCertified(_) => 1,
        Error::PatternTooLong { .. } | Error::SizeLimit(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
