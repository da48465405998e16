use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use freegamma_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error for a table emitter
            let _ = out.write_all(report.output.as_bytes());
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("freegamma: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
