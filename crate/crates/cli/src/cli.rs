//! Command-line grammar. Global flags can also be set through `SPIKED_*`
//! environment variables.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spiked_core::{EntryDistribution, SpikeSpec};

use crate::config::{ExperimentConfig, Grid, TableId};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "spiked", version, about = "Eigenvalue limits and simulations for spiked sample covariance matrices")]
pub struct Cli {
    /// Output format (json, csv, table); each subcommand has its own default.
    #[arg(long, global = true, env = "SPIKED_FORMAT", value_enum)]
    pub format: Option<Format>,

    /// Output file (a directory for density-overlay). Defaults to stdout.
    #[arg(long, global = true, env = "SPIKED_OUT")]
    pub out: Option<PathBuf>,

    /// Base seed; trial t uses seed + t.
    #[arg(long, global = true, env = "SPIKED_SEED")]
    pub seed: Option<u64>,

    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, env = "SPIKED_THREADS")]
    pub threads: Option<usize>,

    /// JSON experiment config; flags override its values.
    #[arg(long, global = true, env = "SPIKED_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limits of the sample eigenvalues.
    Predict(ModelArgs),
    /// Support of the finite-n limiting spectral distribution.
    Support(ModelArgs),
    /// Marchenko-Pastur density on a grid.
    Mplaw(MplawArgs),
    /// Monte Carlo eigenvalues at the predicted ranks.
    Simulate(SimulateArgs),
    /// Rebuild the published c = 0.5 or c = 2 comparison table.
    Reproduce(ReproduceArgs),
    /// Density, histogram and marker files for a plot.
    DensityOverlay(OverlayArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Population dimension.
    #[arg(long)]
    pub p: Option<usize>,

    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,

    /// Aspect ratio, in place of --p/--n (predict only).
    #[arg(long)]
    pub c: Option<f64>,

    /// Spike as `value` or `value:multiplicity`; repeat for several.
    #[arg(long = "spike", value_name = "SPEC")]
    pub spikes: Vec<SpikeSpec>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MplawArgs {
    #[arg(long)]
    pub c: Option<f64>,

    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,

    #[arg(long, value_enum)]
    pub grid: Option<Grid>,

    /// Grid start (default: lower bulk edge).
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,

    /// Grid end (default: upper bulk edge).
    #[arg(long)]
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Entry distribution: gaussian, cgaussian or rademacher.
    #[arg(long)]
    pub dist: Option<EntryDistribution>,

    #[arg(long)]
    pub trials: Option<usize>,

    /// Also write a per-trial eigenvalue histogram with this many bins.
    #[arg(long)]
    pub hist_bins: Option<usize>,

    /// Where the histogram goes.
    #[arg(long)]
    pub hist_out: Option<PathBuf>,

    /// Leave zero eigenvalues out of histograms.
    #[arg(long)]
    pub nonzero_only: bool,

    /// Directory for full spectra, one CSV per trial.
    #[arg(long)]
    pub dump_spectra: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub table: Option<TableId>,

    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OverlayArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long)]
    pub dist: Option<EntryDistribution>,

    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,

    /// Density grid points.
    #[arg(long)]
    pub points: Option<usize>,

    #[arg(long, value_enum)]
    pub grid: Option<Grid>,

    #[arg(long)]
    pub nonzero_only: bool,
}

impl ModelArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            p: self.p,
            n: self.n,
            c: self.c,
            spikes: self.spikes.clone(),
            ..Default::default()
        }
    }
}

impl Cli {
    /// The configuration given on the command line alone.
    pub fn flags(&self) -> ExperimentConfig {
        let cmd = match &self.command {
            Command::Predict(m) | Command::Support(m) => m.config(),
            Command::Mplaw(a) => ExperimentConfig {
                c: a.c,
                points: a.points,
                grid: a.grid,
                lo: a.lo,
                hi: a.hi,
                ..Default::default()
            },
            Command::Simulate(a) => ExperimentConfig {
                distribution: a.dist,
                trials: a.trials,
                bins: a.hist_bins,
                hist_out: a.hist_out.clone(),
                nonzero_only: a.nonzero_only.then_some(true),
                dump_spectra: a.dump_spectra.clone(),
                ..a.model.config()
            },
            Command::Reproduce(a) => ExperimentConfig { table: a.table, trials: a.trials, ..Default::default() },
            Command::DensityOverlay(a) => ExperimentConfig {
                distribution: a.dist,
                bins: a.bins,
                points: a.points,
                grid: a.grid,
                nonzero_only: a.nonzero_only.then_some(true),
                ..a.model.config()
            },
        };
        ExperimentConfig {
            format: self.format,
            out: self.out.clone(),
            seed: self.seed,
            threads: self.threads,
            ..cmd
        }
    }
}
