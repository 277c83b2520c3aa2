//! `ysqht`: theory reports, simulated count logs, their analysis, and sweep
//! tables for the noisy polarization-measurement discrimination problem.
//!
//! Exit codes: 0 ok, 2 usage, 3 reversal present (`theory --check-reversal`),
//! 4 I/O, 5 corrupt input, 6 incompatible schema version.

mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
