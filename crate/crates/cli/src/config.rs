//! Experiment configuration shared by every subcommand.
//!
//! Values come from three layers, highest priority first: command-line flags
//! (or their `SPIKED_*` environment variables), the JSON file named by
//! `--config`, then built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use spiked_core::{EntryDistribution, SpikeSpec, SpikedModel};

use crate::output::Format;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: usize = 5;
pub const DEFAULT_POINTS: usize = 512;
pub const DEFAULT_BINS: usize = 60;

/// Grid for density output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    Uniform,
    /// Points clustered at the bulk edges, where the density has square-root
    /// behaviour.
    #[default]
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    /// `c = 0.5` table: `p = 1000, n = 2000` and `p = 100, n = 200`.
    CHalf,
    /// `c = 2` table: `p = 2000, n = 1000`.
    CTwo,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub c: Option<f64>,
    #[serde(with = "spike_strings")]
    pub spikes: Vec<SpikeSpec>,
    pub distribution: Option<EntryDistribution>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub points: Option<usize>,
    pub grid: Option<Grid>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub bins: Option<usize>,
    pub hist_out: Option<PathBuf>,
    pub nonzero_only: Option<bool>,
    pub dump_spectra: Option<PathBuf>,
    pub table: Option<TableId>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Fills every unset field of `self` from `lower`.
    pub fn or(self, lower: ExperimentConfig) -> Self {
        Self {
            p: self.p.or(lower.p),
            n: self.n.or(lower.n),
            c: self.c.or(lower.c),
            spikes: if self.spikes.is_empty() { lower.spikes } else { self.spikes },
            distribution: self.distribution.or(lower.distribution),
            trials: self.trials.or(lower.trials),
            seed: self.seed.or(lower.seed),
            threads: self.threads.or(lower.threads),
            format: self.format.or(lower.format),
            out: self.out.or(lower.out),
            points: self.points.or(lower.points),
            grid: self.grid.or(lower.grid),
            lo: self.lo.or(lower.lo),
            hi: self.hi.or(lower.hi),
            bins: self.bins.or(lower.bins),
            hist_out: self.hist_out.or(lower.hist_out),
            nonzero_only: self.nonzero_only.or(lower.nonzero_only),
            dump_spectra: self.dump_spectra.or(lower.dump_spectra),
            table: self.table.or(lower.table),
        }
    }

    pub fn dims(&self) -> Result<(usize, usize)> {
        match (self.p, self.n) {
            (Some(p), Some(n)) => Ok((p, n)),
            _ => bail!(spiked_core::Error::InvalidArgument("both --p and --n are required".into())),
        }
    }

    pub fn model(&self) -> Result<SpikedModel> {
        let (p, n) = self.dims()?;
        if self.c.is_some() {
            bail!(spiked_core::Error::InvalidArgument("give either --c or --p/--n, not both".into()));
        }
        Ok(SpikedModel::new(self.spikes.iter().copied(), p, n)?)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn distribution(&self) -> EntryDistribution {
        self.distribution.unwrap_or_default()
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn nonzero_only(&self) -> bool {
        self.nonzero_only.unwrap_or(false)
    }
}

/// Spikes are stored as `value` / `value:multiplicity` strings.
mod spike_strings {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};
    use spiked_core::SpikeSpec;

    pub fn serialize<S: Serializer>(spikes: &[SpikeSpec], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(spikes.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SpikeSpec>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}
