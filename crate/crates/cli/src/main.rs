use std::process::ExitCode;

use clap::Parser;
use numrad_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match std::env::var("NUMRAD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Some(k),
            _ => {
                eprintln!("error: NUMRAD_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };
    let stdout = std::io::stdout();
    match run(cli, threads, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
