use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use persuasion_cli::{exit, run, Cli, THREADS_ENV};

fn main() -> ExitCode {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => persuasion_core::par::set_threads(t),
            _ => {
                eprintln!("error: {THREADS_ENV}={v:?} is not a positive integer");
                return ExitCode::from(exit::INPUT as u8);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
