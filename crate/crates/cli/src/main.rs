use std::process::ExitCode;

use clap::Parser;
use legendre_flow_cli::{run, Cli};

fn main() -> ExitCode {
    let outcome = Cli::parse().into_config().and_then(|c| run(&c));
    match outcome {
        Ok(o) => {
            for f in &o.failures {
                eprintln!("FAIL: {f}");
            }
            for a in &o.artifacts {
                println!("{}", a.display());
            }
            ExitCode::from(o.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
