use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use nestcast_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(&cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()).is_err() {
                return ExitCode::from(nestcast_cli::EXIT_OTHER);
            }
            code
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    };
    eprintln!("{}: {:.3}s wall", cli.command.name(), start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
