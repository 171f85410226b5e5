//! Library behind the `spiked` binary: argument grammar, experiment
//! configuration and the subcommands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use anyhow::Result;

use crate::cli::{Cli, Command};
use crate::config::ExperimentConfig;

/// Flags first, then the `--config` file.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let flags = cli.flags();
    Ok(match &cli.config {
        Some(path) => flags.or(ExperimentConfig::load(path)?),
        None => flags,
    })
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match &cli.command {
        Command::Predict(_) => commands::run_predict(&cfg),
        Command::Support(_) => commands::run_support(&cfg),
        Command::Mplaw(_) => commands::run_mplaw(&cfg),
        Command::Simulate(_) => commands::run_simulate(&cfg),
        Command::Reproduce(_) => commands::run_reproduce(&cfg),
        Command::DensityOverlay(_) => commands::run_density_overlay(&cfg),
    }
}

/// 2 for numerical failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<spiked_core::Error>() {
        Some(e) if e.is_numerical() => 2,
        _ => 1,
    }
}
