use std::io;
use std::process::ExitCode;

use bdmove_cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, args) = cli.command.split();
    let mut out = io::stdout().lock();
    match execute(cmd, &args, &mut out) {
        Ok(status) => ExitCode::from(status.code()),
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
