mod args;
mod battery;
mod commands;
mod input;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use crate::args::Cli;

/// Reads `AVGJOHN_THREADS` (default 1) and sizes the global pool.
fn init_threads() -> Result<()> {
    let threads = match std::env::var("AVGJOHN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .with_context(|| format!("AVGJOHN_THREADS must be a positive integer, got `{v}`"))?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    init_threads()?;
    let outcome = commands::run(cli)?;
    output::emit(cli, &output::render(cli, outcome)?)
}

/// 1 for bad input, 2 when a numerical method gave up.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<avgjohn_core::Error>())
        .any(avgjohn_core::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors; here 2 is reserved for numerics.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
