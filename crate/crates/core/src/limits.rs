//! Almost-sure limits of individual sample eigenvalues.
//!
//! Eigenvalues are indexed 1-based in descending order, `s_1 >= ... >= s_p`.
//! Only indices with a known deterministic limit are reported: the
//! separated spike eigenvalues, the two bulk edges, and (for `c > 1`) the
//! forced zeros. Interior bulk eigenvalues are deliberately left out.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{classify, Regime, SpikeSpec, SpikedModel};
use crate::mplaw::mp_edges;

/// `alpha + c alpha / (alpha - 1)`.
pub fn spike_limit(alpha: f64, c: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::InvalidArgument("spike value 1 is a pole of the limit map".into()));
    }
    Ok(alpha + c * alpha / (alpha - 1.0))
}

/// Position of an eigenvalue, possibly relative to `p` or `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    /// `s_k`.
    Top(usize),
    /// `s_{p-k}`.
    Bottom(usize),
    /// `s_{n+k}`.
    AfterN(usize),
    /// `s_{min(n, p)}`.
    MinDim,
}

impl Rank {
    pub fn resolve(self, p: usize, n: usize) -> Option<usize> {
        let idx = match self {
            Rank::Top(k) => k,
            Rank::Bottom(k) => p.checked_sub(k)?,
            Rank::AfterN(k) => n + k,
            Rank::MinDim => n.min(p),
        };
        (1..=p).contains(&idx).then_some(idx)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Top(k) => write!(f, "s_{k}"),
            Rank::Bottom(0) => f.write_str("s_p"),
            Rank::Bottom(k) => write!(f, "s_{{p-{k}}}"),
            Rank::AfterN(0) => f.write_str("s_n"),
            Rank::AfterN(k) => write!(f, "s_{{n+{k}}}"),
            Rank::MinDim => f.write_str("s_{min(n,p)}"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryKind {
    /// 0-based index into the model's canonical spike list.
    Spike { spike: usize },
    BulkUpperEdge,
    BulkLowerEdge,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionEntry {
    pub from: Rank,
    pub to: Rank,
    /// Inclusive absolute index range, when the dimensions are known.
    pub indices: Option<(usize, usize)>,
    pub limit: f64,
    #[serde(flatten)]
    pub kind: EntryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AspectRegime {
    #[serde(rename = "c<1")]
    Below,
    #[serde(rename = "c=1")]
    Equal,
    #[serde(rename = "c>1")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub c: f64,
    pub regime: AspectRegime,
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub entries: Vec<PredictionEntry>,
}

impl PredictionReport {
    /// Limit predicted for absolute index `i`, if any.
    pub fn limit_at(&self, i: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.indices.is_some_and(|(lo, hi)| lo <= i && i <= hi))
            .map(|e| e.limit)
    }

    /// Absolute indices of the spike and edge entries, ascending.
    pub fn tracked_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| e.kind != EntryKind::Zero)
            .filter_map(|e| e.indices)
            .flat_map(|(lo, hi)| lo..=hi)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn spike_entries(&self) -> impl Iterator<Item = &PredictionEntry> {
        self.entries.iter().filter(|e| matches!(e.kind, EntryKind::Spike { .. }))
    }
}

/// Limits for the model's spikes at aspect ratio `c`, with indices resolved
/// against the model's `p` and `n`.
pub fn predict(model: &SpikedModel, c: f64) -> Result<PredictionReport> {
    build(model.spikes(), c, Some((model.p(), model.n())))
}

/// Limits at aspect ratio `c` with symbolic indices only.
pub fn predict_limits(spikes: &[SpikeSpec], c: f64) -> Result<PredictionReport> {
    let canonical = SpikedModel::unchecked(spikes.iter().copied(), usize::MAX, 1);
    build(canonical.spikes(), c, None)
}

fn build(spikes: &[SpikeSpec], c: f64, dims: Option<(usize, usize)>) -> Result<PredictionReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
    }
    if let Some(s) = spikes.iter().find(|s| !(s.alpha > 0.0) || s.alpha == 1.0) {
        return Err(Error::InvalidArgument(format!("spike value {} is not admissible", s.alpha)));
    }
    let regime = if c < 1.0 {
        AspectRegime::Below
    } else if c == 1.0 {
        AspectRegime::Equal
    } else {
        AspectRegime::Above
    };
    let (lower_edge, upper_edge) = mp_edges(c);
    let r: usize = spikes.iter().map(|s| s.multiplicity).sum();

    // cumulative[j] = k_1 + ... + k_j
    let mut cumulative = vec![0usize];
    for s in spikes {
        cumulative.push(cumulative.last().unwrap() + s.multiplicity);
    }
    let regimes: Vec<Regime> = spikes.iter().map(|s| classify(s.alpha, c).regime).collect();
    let above = regimes.iter().take_while(|r| **r == Regime::Supercritical).count();
    let below = regimes.iter().rev().take_while(|r| **r == Regime::Subcritical).count();
    let not_below = spikes.len() - below;

    let mut entries = Vec::new();
    let mut push = |from: Rank, to: Rank, limit: f64, kind: EntryKind| {
        let indices = match dims {
            Some((p, n)) => match (from.resolve(p, n), to.resolve(p, n)) {
                (Some(a), Some(b)) if a <= b => Some((a, b)),
                _ => return,
            },
            None => None,
        };
        entries.push(PredictionEntry { from, to, indices, limit, kind });
    };

    for j in 0..above {
        let limit = spike_limit(spikes[j].alpha, c)?;
        push(
            Rank::Top(cumulative[j] + 1),
            Rank::Top(cumulative[j + 1]),
            limit,
            EntryKind::Spike { spike: j },
        );
    }
    let top_edge = Rank::Top(cumulative[above] + 1);
    push(top_edge, top_edge, upper_edge, EntryKind::BulkUpperEdge);

    match regime {
        AspectRegime::Below => {
            let low_edge = Rank::Bottom(r - cumulative[not_below]);
            push(low_edge, low_edge, lower_edge, EntryKind::BulkLowerEdge);
            for j in not_below..spikes.len() {
                let limit = spike_limit(spikes[j].alpha, c)?;
                push(
                    Rank::Bottom(r - cumulative[j] - 1),
                    Rank::Bottom(r - cumulative[j + 1]),
                    limit,
                    EntryKind::Spike { spike: j },
                );
            }
        }
        AspectRegime::Above => {
            push(Rank::AfterN(0), Rank::AfterN(0), lower_edge, EntryKind::BulkLowerEdge);
            push(Rank::AfterN(1), Rank::Bottom(0), 0.0, EntryKind::Zero);
        }
        AspectRegime::Equal => {
            push(Rank::MinDim, Rank::MinDim, 0.0, EntryKind::BulkLowerEdge);
        }
    }

    Ok(PredictionReport { c, regime, p: dims.map(|d| d.0), n: dims.map(|d| d.1), entries })
}
