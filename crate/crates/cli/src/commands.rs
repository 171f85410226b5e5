//! Subcommand bodies. Each returns after all of its output is written; files
//! are produced from fully aggregated results by a single writer.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use spiked_core::simulate::RNG_SCHEME;
use spiked_core::support::{CriticalPoints, Edge};
use spiked_core::{
    histogram, mp_cdf, mp_density, mp_edges, predict, predict_limits, run_trials, sample_eigenvalues,
    summarize, support_complement, EigenSample, EntryDistribution, EntryKind, Error, IndexStats, MpLaw,
    PredictionEntry, PredictionReport, SpikeSpec, SpikedModel,
};

use crate::config::{ExperimentConfig, Grid, TableId, DEFAULT_BINS, DEFAULT_POINTS};
use crate::output::{emit, fmt5, json, num, table, write_file, Csv, Format};

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

fn unsupported(cmd: &str, format: Format) -> anyhow::Error {
    invalid(format!("{cmd} does not support --format {format:?}").to_lowercase())
}

fn entry_label(e: &PredictionEntry) -> String {
    match e.indices {
        Some((a, b)) if a == b => format!("s_{a}"),
        Some((a, b)) => format!("s_{a}..s_{b}"),
        None if e.from == e.to => e.from.to_string(),
        None => format!("{}..{}", e.from, e.to),
    }
}

fn kind_name(kind: EntryKind) -> &'static str {
    match kind {
        EntryKind::Spike { .. } => "spike",
        EntryKind::BulkUpperEdge => "bulk-upper-edge",
        EntryKind::BulkLowerEdge => "bulk-lower-edge",
        EntryKind::Zero => "zero",
    }
}

/// Spike entries in ascending order of their limit, as the published tables
/// list them.
fn spike_columns(report: &PredictionReport) -> Vec<&PredictionEntry> {
    let mut v: Vec<&PredictionEntry> = report.spike_entries().collect();
    v.sort_by(|a, b| a.limit.total_cmp(&b.limit));
    v
}

pub fn predict_report(cfg: &ExperimentConfig) -> Result<PredictionReport> {
    match (cfg.p, cfg.n, cfg.c) {
        (None, None, Some(c)) => Ok(predict_limits(&cfg.spikes, c)?),
        (Some(_), Some(_), None) => {
            let m = cfg.model()?;
            Ok(predict(&m, m.c_p())?)
        }
        _ => Err(invalid("give --p and --n, or --c alone")),
    }
}

pub fn run_predict(cfg: &ExperimentConfig) -> Result<()> {
    let report = predict_report(cfg)?;
    let text = match cfg.format_or(Format::Table) {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(["from", "to", "first", "last", "kind", "spike", "limit"])?;
            for e in &report.entries {
                let (first, last) = e.indices.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
                let spike = match e.kind {
                    EntryKind::Spike { spike } => spike.to_string(),
                    _ => String::new(),
                };
                csv.row([e.from.to_string(), e.to.to_string(), first, last, kind_name(e.kind).into(), spike, num(e.limit)])?;
            }
            csv.finish()?
        }
        Format::Table => {
            let cols = spike_columns(&report);
            let mut header = vec![String::new()];
            header.extend(cols.iter().map(|e| entry_label(e)));
            let mut row = vec!["theoretical".to_string()];
            row.extend(cols.iter().map(|e| fmt5(e.limit)));
            let mut text = format!("c = {}\n\n", fmt5(report.c));
            if !cols.is_empty() {
                text += &table(&header, &[row]);
                text.push('\n');
            }
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| vec![entry_label(e), kind_name(e.kind).to_string(), fmt5(e.limit)])
                .collect();
            text += &table(&["rank".into(), "kind".into(), "limit".into()], &rows);
            text
        }
    };
    emit(cfg.out.as_deref(), &text)
}

#[derive(Serialize)]
struct IntervalDoc {
    /// `null` stands for an unbounded end.
    lo: Option<f64>,
    hi: Option<f64>,
    m_lo: Option<f64>,
    m_hi: Option<f64>,
}

#[derive(Serialize)]
struct SupportDoc {
    p: usize,
    n: usize,
    c_p: f64,
    complement: Vec<IntervalDoc>,
    support: Vec<[f64; 2]>,
    edges: Vec<Edge>,
    critical_points: CriticalPoints,
    warnings: Vec<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn run_support(cfg: &ExperimentConfig) -> Result<()> {
    let m = cfg.model()?;
    let r = support_complement(&m)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let text = match cfg.format_or(Format::Json) {
        Format::Json => json(&SupportDoc {
            p: r.p,
            n: r.n,
            c_p: r.c_p,
            complement: r
                .complement
                .iter()
                .map(|iv| IntervalDoc { lo: finite(iv.lo), hi: finite(iv.hi), m_lo: finite(iv.m_lo), m_hi: finite(iv.m_hi) })
                .collect(),
            support: r.support_intervals().into_iter().map(|(a, b)| [a, b]).collect(),
            edges: r.edges.clone(),
            critical_points: r.critical_points.clone(),
            warnings: r.warnings.clone(),
        })?,
        Format::Csv => {
            let mut csv = Csv::new(["lo", "hi", "m_lo", "m_hi"])?;
            for iv in &r.complement {
                csv.row([num(iv.lo), num(iv.hi), num(iv.m_lo), num(iv.m_hi)])?;
            }
            csv.finish()?
        }
        Format::Table => {
            let rows: Vec<Vec<String>> =
                r.complement.iter().map(|iv| vec![fmt5(iv.lo), fmt5(iv.hi), num(iv.m_lo), num(iv.m_hi)]).collect();
            let mut text = format!("complement of the support, c_p = {}\n\n", fmt5(r.c_p));
            text += &table(&["lo".into(), "hi".into(), "m_lo".into(), "m_hi".into()], &rows);
            let rows: Vec<Vec<String>> =
                r.edges.iter().map(|e| vec![e.label.to_string(), num(e.m), fmt5(e.x)]).collect();
            text.push('\n');
            text += &table(&["root".into(), "m".into(), "edge".into()], &rows);
            text
        }
    };
    emit(cfg.out.as_deref(), &text)
}

fn grid(kind: Grid, lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| {
            let t = i as f64 / last;
            let u = match kind {
                Grid::Uniform => t,
                Grid::Cosine => 0.5 * (1.0 - (std::f64::consts::PI * t).cos()),
            };
            if i + 1 == points { hi } else { lo + (hi - lo) * u }
        })
        .collect()
}

fn density_grid(cfg: &ExperimentConfig, c: f64) -> Result<Vec<f64>> {
    let (a, b) = mp_edges(c);
    let (lo, hi) = (cfg.lo.unwrap_or(a), cfg.hi.unwrap_or(b));
    let points = cfg.points.unwrap_or(DEFAULT_POINTS);
    if points == 0 || !(lo <= hi) {
        return Err(invalid(format!("need at least one point and lo <= hi, got {points} points on [{lo}, {hi}]")));
    }
    Ok(grid(cfg.grid.unwrap_or_default(), lo, hi, points))
}

#[derive(Serialize)]
struct DensityPoint {
    x: f64,
    density: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct MplawDoc {
    #[serde(flatten)]
    law: MpLaw,
    points: Vec<DensityPoint>,
}

pub fn run_mplaw(cfg: &ExperimentConfig) -> Result<()> {
    let c = cfg.c.ok_or_else(|| invalid("--c is required"))?;
    let law = MpLaw::new(c)?;
    let xs = density_grid(cfg, c)?;
    let text = match cfg.format_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(["x", "density"])?;
            for &x in &xs {
                csv.row([num(x), num(mp_density(x, c))])?;
            }
            csv.finish()?
        }
        Format::Json => json(&MplawDoc {
            law,
            points: xs.iter().map(|&x| DensityPoint { x, density: mp_density(x, c), cdf: mp_cdf(x, c) }).collect(),
        })?,
        f => return Err(unsupported("mplaw", f)),
    };
    emit(cfg.out.as_deref(), &text)
}

#[derive(Serialize)]
struct ModelDoc {
    p: usize,
    n: usize,
    spikes: Vec<String>,
}

impl From<&SpikedModel> for ModelDoc {
    fn from(m: &SpikedModel) -> Self {
        Self { p: m.p(), n: m.n(), spikes: m.spikes().iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Serialize)]
struct TrialDoc {
    seed: u64,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct SimulateDoc {
    model: ModelDoc,
    distribution: EntryDistribution,
    trials: usize,
    base_seed: u64,
    rng: &'static str,
    tracked: Vec<usize>,
    stats: Vec<IndexStats>,
    rows: Vec<TrialDoc>,
}

fn stats_table(stats: &[IndexStats]) -> String {
    let header: Vec<String> =
        ["index", "predicted", "mean", "std", "min", "max"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = stats
        .iter()
        .map(|s| {
            vec![
                format!("s_{}", s.index),
                s.predicted.map_or(String::new(), fmt5),
                fmt5(s.mean),
                fmt5(s.std),
                fmt5(s.min),
                fmt5(s.max),
            ]
        })
        .collect();
    table(&header, &rows)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn histogram_csv(samples: &[EigenSample], bins: usize, nonzero_only: bool) -> Result<String> {
    let top = samples.iter().map(|s| s.s(1)).fold(0.0, f64::max);
    let mut csv = Csv::new(["seed", "bin", "lo", "hi", "count"])?;
    for s in samples {
        let h = histogram(s, bins, Some((0.0, top)), nonzero_only)?;
        for (i, count) in h.counts.iter().enumerate() {
            let (lo, hi) = h.bin_edges(i);
            csv.row([s.seed.to_string(), i.to_string(), num(lo), num(hi), count.to_string()])?;
        }
    }
    csv.finish()
}

fn spectrum_csv(s: &EigenSample) -> Result<String> {
    let mut csv = Csv::new(["index", "eigenvalue"])?;
    for (i, v) in s.eigenvalues.iter().enumerate() {
        csv.row([(i + 1).to_string(), num(*v)])?;
    }
    csv.finish()
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<()> {
    let m = cfg.model()?;
    let dist = cfg.distribution();
    let seed = cfg.seed();
    let format = cfg.format_or(Format::Csv);
    let hist = match (cfg.bins, &cfg.hist_out) {
        (Some(0), _) => return Err(invalid("--hist-bins must be at least 1")),
        (Some(b), Some(path)) => Some((b, path.clone())),
        (Some(_), None) => return Err(invalid("--hist-bins needs --hist-out")),
        (None, _) => None,
    };

    let samples = run_trials(&m, dist, cfg.trials(), seed)?;
    let summary = summarize(&m, dist, seed, &samples)?;

    let text = match format {
        Format::Csv => {
            let mut header = vec!["seed".to_string()];
            header.extend(summary.tracked.iter().map(|i| format!("s_{i}")));
            let mut csv = Csv::new(&header)?;
            for row in &summary.rows {
                let mut fields = vec![row.seed.to_string()];
                fields.extend(row.values.iter().map(|v| num(*v)));
                csv.row(&fields)?;
            }
            csv.finish()?
        }
        Format::Json => json(&SimulateDoc {
            model: (&m).into(),
            distribution: dist,
            trials: summary.trials,
            base_seed: seed,
            rng: RNG_SCHEME,
            tracked: summary.tracked.clone(),
            stats: summary.stats.clone(),
            rows: summary.rows.iter().map(|r| TrialDoc { seed: r.seed, values: r.values.clone() }).collect(),
        })?,
        Format::Table => stats_table(&summary.stats),
    };
    emit(cfg.out.as_deref(), &text)?;

    if let Some((bins, path)) = hist {
        write_file(&path, &histogram_csv(&samples, bins, cfg.nonzero_only())?)?;
    }
    if let Some(dir) = &cfg.dump_spectra {
        ensure_dir(dir)?;
        for s in &samples {
            write_file(&dir.join(format!("spectrum_seed_{}.csv", s.seed)), &spectrum_csv(s)?)?;
        }
    }
    Ok(())
}

/// Spikes shared by both published tables.
pub fn paper_spikes() -> Vec<SpikeSpec> {
    vec![SpikeSpec::new(4.0, 1), SpikeSpec::new(3.0, 1), SpikeSpec::new(0.1, 1)]
}

/// `(distribution, p, n)` runs behind each published table, in its row order.
pub fn table_runs(id: TableId) -> Vec<(EntryDistribution, usize, usize)> {
    use EntryDistribution::{Rademacher, RealGaussian};
    match id {
        TableId::CHalf => vec![
            (RealGaussian, 1000, 2000),
            (RealGaussian, 100, 200),
            (Rademacher, 1000, 2000),
            (Rademacher, 100, 200),
        ],
        TableId::CTwo => vec![(RealGaussian, 2000, 1000), (Rademacher, 2000, 1000)],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservedRow {
    pub distribution: EntryDistribution,
    pub p: usize,
    pub n: usize,
    pub indices: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub abs_error: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproduceReport {
    pub table: TableId,
    pub c: f64,
    pub spikes: Vec<String>,
    pub trials: usize,
    pub base_seed: u64,
    pub rng: &'static str,
    pub columns: Vec<String>,
    pub theoretical: Vec<f64>,
    pub rows: Vec<ObservedRow>,
}

pub fn reproduce(id: TableId, trials: usize, seed: u64) -> Result<ReproduceReport> {
    let spikes = paper_spikes();
    let c = match id {
        TableId::CHalf => 0.5,
        TableId::CTwo => 2.0,
    };
    let symbolic = predict_limits(&spikes, c)?;
    let cols = spike_columns(&symbolic);
    let theoretical: Vec<f64> = cols.iter().map(|e| e.limit).collect();
    let mut rows = Vec::new();
    for (dist, p, n) in table_runs(id) {
        let m = SpikedModel::new(spikes.iter().copied(), p, n)?;
        let indices = cols
            .iter()
            .map(|e| e.from.resolve(p, n).ok_or_else(|| invalid(format!("{} is out of range for p = {p}", e.from))))
            .collect::<Result<Vec<usize>>>()?;
        let samples = run_trials(&m, dist, trials, seed)?;
        let summary = summarize(&m, dist, seed, &samples)?;
        let stat = |i: usize| summary.stats_at(i).cloned().ok_or_else(|| invalid(format!("s_{i} is not tracked")));
        let stats = indices.iter().map(|&i| stat(i)).collect::<Result<Vec<IndexStats>>>()?;
        rows.push(ObservedRow {
            distribution: dist,
            p,
            n,
            mean: stats.iter().map(|s| s.mean).collect(),
            std: stats.iter().map(|s| s.std).collect(),
            abs_error: stats.iter().zip(&theoretical).map(|(s, t)| (s.mean - t).abs()).collect(),
            indices,
        });
    }
    Ok(ReproduceReport {
        table: id,
        c,
        spikes: spikes.iter().map(|s| s.to_string()).collect(),
        trials,
        base_seed: seed,
        rng: RNG_SCHEME,
        columns: cols.iter().map(|e| e.from.to_string()).collect(),
        theoretical,
        rows,
    })
}

pub fn reproduce_table(r: &ReproduceReport) -> String {
    let mut header = vec![String::new()];
    header.extend(r.columns.iter().cloned());
    header.extend(r.columns.iter().map(|c| format!("|err {c}|")));
    let mut rows = vec![{
        let mut row = vec!["theoretical".to_string()];
        row.extend(r.theoretical.iter().map(|v| fmt5(*v)));
        row.extend(r.columns.iter().map(|_| String::new()));
        row
    }];
    for o in &r.rows {
        let mut row = vec![format!("{} p={}", o.distribution, o.p)];
        row.extend(o.mean.iter().map(|v| fmt5(*v)));
        row.extend(o.abs_error.iter().map(|v| fmt5(*v)));
        rows.push(row);
    }
    format!(
        "c = {}, spikes {}, mean of {} trials from seed {}\n\n{}",
        fmt5(r.c),
        r.spikes.join(", "),
        r.trials,
        r.base_seed,
        table(&header, &rows)
    )
}

pub fn run_reproduce(cfg: &ExperimentConfig) -> Result<()> {
    let id = cfg.table.ok_or_else(|| invalid("choose a table: c-half or c-two"))?;
    let report = reproduce(id, cfg.trials(), cfg.seed())?;
    let text = match cfg.format_or(Format::Table) {
        Format::Table => reproduce_table(&report),
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv =
                Csv::new(["distribution", "p", "n", "column", "index", "theoretical", "mean", "std", "abs_error"])?;
            for o in &report.rows {
                for k in 0..report.columns.len() {
                    csv.row([
                        o.distribution.to_string(),
                        o.p.to_string(),
                        o.n.to_string(),
                        report.columns[k].clone(),
                        o.indices[k].to_string(),
                        num(report.theoretical[k]),
                        num(o.mean[k]),
                        num(o.std[k]),
                        num(o.abs_error[k]),
                    ])?;
                }
            }
            csv.finish()?
        }
    };
    emit(cfg.out.as_deref(), &text)
}

/// Files written by `density-overlay`, relative to the output directory.
pub const OVERLAY_FILES: [&str; 4] = ["density.csv", "histogram.csv", "markers.csv", "observed.csv"];

pub fn run_density_overlay(cfg: &ExperimentConfig) -> Result<()> {
    if let Some(f) = cfg.format.filter(|f| *f != Format::Csv) {
        return Err(unsupported("density-overlay", f));
    }
    let dir: PathBuf = cfg.out.clone().ok_or_else(|| invalid("--out <DIR> is required"))?;
    let m = cfg.model()?;
    let c = m.c_p();
    let sample = sample_eigenvalues(&m, cfg.distribution(), cfg.seed())?;
    let report = predict(&m, c)?;

    let mut density = Csv::new(["x", "density"])?;
    for x in density_grid(cfg, c)? {
        density.row([num(x), num(mp_density(x, c))])?;
    }

    let bins = cfg.bins.unwrap_or(DEFAULT_BINS);
    let h = histogram(&sample, bins, None, cfg.nonzero_only())?;
    // normalized by p so the bars sit on the continuous part of the density
    let heights = h.density(m.p() as f64);
    let mut hist = Csv::new(["lo", "hi", "count", "density"])?;
    for (i, (count, d)) in h.counts.iter().zip(&heights).enumerate() {
        let (lo, hi) = h.bin_edges(i);
        hist.row([num(lo), num(hi), count.to_string(), num(*d)])?;
    }

    let mut markers = Csv::new(["rank", "first", "last", "position"])?;
    for e in spike_columns(&report) {
        let (a, b) = e.indices.unwrap_or_default();
        markers.row([e.from.to_string(), a.to_string(), b.to_string(), num(e.limit)])?;
    }

    let mut observed = Csv::new(["index", "eigenvalue"])?;
    for i in report.tracked_indices() {
        observed.row([i.to_string(), num(sample.s(i))])?;
    }

    ensure_dir(&dir)?;
    let docs = [density.finish()?, hist.finish()?, markers.finish()?, observed.finish()?];
    for (name, text) in OVERLAY_FILES.iter().zip(&docs) {
        write_file(&dir.join(name), text)?;
    }
    Ok(())
}
