mod cli;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    let outcome = commands::run(&args.command)
        .and_then(|o| output::emit(&o, args.output.format, args.output.out.as_deref()).map(|_| o));
    match outcome {
        Ok(o) => ExitCode::from(o.exit_code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
