//! Monte Carlo simulation of spiked sample covariance spectra.
//!
//! Entries are drawn from ChaCha20 (`rand_chacha`), one generator per
//! sample seeded with `seed_from_u64(seed)`; a Monte Carlo run with base seed
//! `s` uses seeds `s, s+1, ...` for its trials, so every trial owns an
//! independent key and results do not depend on how trials are scheduled.
//! The data matrix is filled column by column (one column per sample
//! vector), which makes the first `n` columns of an `(p, n')` draw equal to
//! the `(p, n)` draw with the same seed.

use nalgebra::{Complex, ComplexField, DMatrix, SymmetricTridiagonal};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::predict;
use crate::model::{EntryDistribution, SpikedModel};

/// Identifies the generator stream layout. Bump when sampling changes.
pub const RNG_SCHEME: &str = "chacha20-seed_from_u64-colmajor-v1";

/// Eigenvalues below this fraction of the largest are set to exactly zero.
pub const ZERO_CLAMP: f64 = 1e-10;

const QL_MAX_ITER: usize = 60;

/// Raw `p x n` matrix `Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex<f64>>),
}

impl Entries {
    pub fn generate(p: usize, n: usize, dist: EntryDistribution, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let len = p * n;
        match dist {
            EntryDistribution::RealGaussian => {
                let data: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
                Entries::Real(DMatrix::from_vec(p, n, data))
            }
            EntryDistribution::ComplexGaussian => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let data: Vec<Complex<f64>> = (0..len)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                Entries::Complex(DMatrix::from_vec(p, n, data))
            }
            EntryDistribution::Rademacher => {
                let mut data = Vec::with_capacity(len);
                while data.len() < len {
                    let bits = rng.next_u64();
                    let take = (len - data.len()).min(64);
                    data.extend((0..take).map(|b| if (bits >> b) & 1 == 1 { 1.0 } else { -1.0 }));
                }
                Entries::Real(DMatrix::from_vec(p, n, data))
            }
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Entries::Real(z) => z.shape(),
            Entries::Complex(z) => z.shape(),
        }
    }

    /// The first `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        match self {
            Entries::Real(z) => Entries::Real(z.columns(0, n).into_owned()),
            Entries::Complex(z) => Entries::Complex(z.columns(0, n).into_owned()),
        }
    }
}

/// Which Gram matrix the spectrum is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumForm {
    /// `p x p`: `(1/n) X X*`.
    Direct,
    /// `n x n`: `(1/n) X* X`.
    Companion,
    /// Whichever is smaller.
    Auto,
}

/// Sorted spectrum of `B = (1/n) T^{1/2} Z Z* T^{1/2}` plus `trace(B)`
/// computed straight from the entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Descending, length `p`.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
}

pub fn spectrum(model: &SpikedModel, entries: &Entries, form: SpectrumForm) -> Result<Spectrum> {
    let (p, n) = entries.shape();
    if p != model.p() {
        return Err(Error::InvalidArgument(format!(
            "entries have {p} rows but the model has p = {}",
            model.p()
        )));
    }
    let scale: Vec<f64> = model.population_diagonal().iter().map(|t| t.sqrt()).collect();
    let companion = match form {
        SpectrumForm::Direct => false,
        SpectrumForm::Companion => true,
        SpectrumForm::Auto => p > n,
    };
    let inv_n = 1.0 / n as f64;
    let (values, trace) = match entries {
        Entries::Real(z) => {
            let mut x = z.clone();
            for (mut row, s) in x.row_iter_mut().zip(&scale) {
                row *= *s;
            }
            let trace = x.iter().map(|v| v * v).sum::<f64>() * inv_n;
            let gram = if companion { x.tr_mul(&x) } else { &x * x.transpose() };
            (hermitian_eigenvalues(gram * inv_n)?, trace)
        }
        Entries::Complex(z) => {
            let mut x = z.clone();
            for (mut row, s) in x.row_iter_mut().zip(&scale) {
                row *= Complex::new(*s, 0.0);
            }
            let trace = x.iter().map(|v| v.norm_sqr()).sum::<f64>() * inv_n;
            let gram = if companion { x.ad_mul(&x) } else { &x * x.adjoint() };
            (hermitian_eigenvalues(gram * Complex::new(inv_n, 0.0))?, trace)
        }
    };
    Ok(Spectrum { eigenvalues: finish(values, p), trace })
}

/// Sorts descending, pads with zeros to length `p`, and clamps values below
/// `ZERO_CLAMP * s_1` to zero.
fn finish(mut values: Vec<f64>, p: usize) -> Vec<f64> {
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(p, 0.0);
    let cutoff = ZERO_CLAMP * values.first().copied().unwrap_or(0.0).max(0.0);
    for v in &mut values {
        if *v < cutoff {
            *v = 0.0;
        }
    }
    values
}

/// Full spectrum of a Hermitian matrix: Householder reduction to a real
/// symmetric tridiagonal matrix followed by implicit QL iterations.
pub fn hermitian_eigenvalues<T>(m: DMatrix<T>) -> Result<Vec<f64>>
where
    T: ComplexField<RealField = f64>,
{
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    if dim == 1 {
        return Ok(vec![m[(0, 0)].clone().real()]);
    }
    let (diag, off) = SymmetricTridiagonal::new(m).unpack_tridiagonal();
    let mut d: Vec<f64> = diag.iter().copied().collect();
    let mut e: Vec<f64> = off.iter().copied().collect();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e).map_err(|reason| Error::EigenSolver { seed: 0, reason })?;
    Ok(d)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[i] = T[i, i+1]` (`e.len() == d.len()`, last entry unused).
/// On success `d` holds the eigenvalues, unordered.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> std::result::Result<(), String> {
    let n = d.len();
    debug_assert_eq!(e.len(), n);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(format!("no convergence for eigenvalue {l} after {QL_MAX_ITER} sweeps"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSample {
    /// Descending, length `p`; entries below `ZERO_CLAMP * s_1` are exactly 0.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub model: SpikedModel,
    pub distribution: EntryDistribution,
    pub seed: u64,
}

impl EigenSample {
    /// `s_i` with `s_0 = +inf` and `s_{p+1} = -inf`.
    pub fn s(&self, i: usize) -> f64 {
        match i {
            0 => f64::INFINITY,
            i if i > self.eigenvalues.len() => f64::NEG_INFINITY,
            i => self.eigenvalues[i - 1],
        }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().copied().filter(|v| *v != 0.0)
    }
}

/// Draws one realization and returns its sorted spectrum.
pub fn sample_eigenvalues(
    model: &SpikedModel,
    dist: EntryDistribution,
    seed: u64,
) -> Result<EigenSample> {
    let entries = Entries::generate(model.p(), model.n(), dist, seed);
    let spec = spectrum(model, &entries, SpectrumForm::Auto).map_err(|e| match e {
        Error::EigenSolver { reason, .. } => Error::EigenSolver { seed, reason },
        other => other,
    })?;
    Ok(EigenSample {
        eigenvalues: spec.eigenvalues,
        trace: spec.trace,
        model: model.clone(),
        distribution: dist,
        seed,
    })
}

/// Runs `trials` samples with seeds `base_seed, base_seed + 1, ...`, in
/// parallel; the result is ordered by seed.
pub fn run_trials(
    model: &SpikedModel,
    dist: EntryDistribution,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<EigenSample>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_eigenvalues(model, dist, base_seed.wrapping_add(t)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexStats {
    pub index: usize,
    pub predicted: Option<f64>,
    pub mean: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    /// Values at `MonteCarloSummary::tracked`, in order.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub distribution: EntryDistribution,
    pub p: usize,
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub tracked: Vec<usize>,
    pub stats: Vec<IndexStats>,
    pub rows: Vec<TrialRow>,
}

impl MonteCarloSummary {
    pub fn stats_at(&self, index: usize) -> Option<&IndexStats> {
        self.stats.iter().find(|s| s.index == index)
    }
}

/// Aggregates the eigenvalues at the indices named by the limit prediction.
pub fn monte_carlo(
    model: &SpikedModel,
    dist: EntryDistribution,
    trials: usize,
    base_seed: u64,
) -> Result<MonteCarloSummary> {
    let samples = run_trials(model, dist, trials, base_seed)?;
    summarize(model, dist, base_seed, &samples)
}

/// Aggregation step of [`monte_carlo`], for callers that keep the spectra.
pub fn summarize(
    model: &SpikedModel,
    dist: EntryDistribution,
    base_seed: u64,
    samples: &[EigenSample],
) -> Result<MonteCarloSummary> {
    let prediction = predict(model, model.c_p())?;
    let tracked = prediction.tracked_indices();
    let rows: Vec<TrialRow> = samples
        .iter()
        .map(|s| TrialRow { seed: s.seed, values: tracked.iter().map(|&i| s.s(i)).collect() })
        .collect();
    let stats = tracked
        .iter()
        .enumerate()
        .map(|(k, &index)| {
            let xs: Vec<f64> = rows.iter().map(|r| r.values[k]).collect();
            let count = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / count;
            let var = if xs.len() > 1 {
                xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            IndexStats {
                index,
                predicted: prediction.limit_at(index),
                mean,
                std: var.sqrt(),
                min: xs.iter().copied().fold(f64::INFINITY, f64::min),
                max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    Ok(MonteCarloSummary {
        distribution: dist,
        p: model.p(),
        n: model.n(),
        trials: samples.len(),
        base_seed,
        tracked,
        stats,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationCheck {
    pub a: f64,
    pub b: f64,
    pub i_p: usize,
    pub passed: bool,
}

/// Exactly `i_p` eigenvalues above `b` and none in `[a, b]`:
/// `s_{i_p} > b` and `s_{i_p + 1} < a`.
pub fn separation_check(sample: &EigenSample, a: f64, b: f64, i_p: usize) -> Result<SeparationCheck> {
    if !(0.0 < a && a < b) {
        return Err(Error::InvalidArgument(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    let passed = sample.s(i_p) > b && sample.s(i_p + 1) < a;
    Ok(SeparationCheck { a, b, i_p, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `count / (mass * width)` per bin.
    pub fn density(&self, mass: f64) -> Vec<f64> {
        let w = self.bin_width();
        self.counts.iter().map(|&c| c as f64 / (mass * w)).collect()
    }
}

/// Uniform-width bins over `range` (default `[0, s_1]`); the last bin is
/// closed on the right and values outside the range are dropped.
pub fn histogram(
    sample: &EigenSample,
    bins: usize,
    range: Option<(f64, f64)>,
    nonzero_only: bool,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    let (lo, hi) = range.unwrap_or((0.0, sample.s(1).max(0.0)));
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidArgument(format!("invalid histogram range [{lo}, {hi}]")));
    }
    let hi = if hi == lo { lo + 1.0 } else { hi };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in &sample.eigenvalues {
        if (nonzero_only && v == 0.0) || v < lo || v > hi {
            continue;
        }
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { lo, hi, counts })
}
