use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hetcorr::harness::{self, ConfigError, HarnessError};

/// Run a stochastic-geometry Monte Carlo experiment described by a config file.
#[derive(Debug, Parser)]
#[command(name = "hetcorr", version)]
struct Cli {
    /// Path to the `key = value` run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (overrides `out` in the config; stdout if neither is set).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read {}: {e}", cli.config.display()),
    })?;
    let mut config = harness::parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if let Some(out) = cli.out {
        config.out = Some(out);
    }
    let csv = harness::run(&config)?;
    match &config.out {
        Some(path) => harness::write_atomically(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hetcorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
