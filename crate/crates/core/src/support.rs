//! Support of the deterministic-equivalent law `F_p` at finite `(p, n)`.
//!
//! `F_p` is defined through the functional inverse of its Stieltjes
//! transform,
//!
//! ```text
//! z_p(m) = -1/m + c_p/(1+m) + (1/n) [ sum_j k_j a_j/(1 + a_j m) - r/(1+m) ]
//! ```
//!
//! A real `x` lies outside the support exactly when `x = z_p(m)` for some
//! real `m != 0` with `-1/m` not a population eigenvalue and `z_p'(m) > 0`.
//! The numerator of `z_p'` is a polynomial of degree `2M + 2`; its real roots
//! together with the poles `{0, -1, -1/a_j}` cut the real line into pieces on
//! which the sign of `z_p'` is constant, and every piece with positive sign
//! maps onto one interval of the complement.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{classify, Regime, SpikedModel};
use crate::poly::Poly;

/// Hard error when a spike sits this close to a threshold `1 +- sqrt(c_p)`.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Warning when a spike sits this close to a threshold.
pub const NEAR_DEGENERACY_TOL: f64 = 1e-6;
/// Relative bracket width at which bisection stops.
pub const ROOT_REL_TOL: f64 = 1e-13;
/// Agreement required between bisection and companion-matrix roots.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

const POLE_GUARD: f64 = 4.0 * f64::EPSILON;
const COMPLEX_IM_TOL: f64 = 1e-6;

/// `z_p` and `z_p'` for one model, with its pole set.
#[derive(Debug, Clone)]
pub struct RationalInverse {
    model: SpikedModel,
    poles: Vec<f64>,
}

impl RationalInverse {
    pub fn new(model: &SpikedModel) -> Self {
        let mut poles = vec![0.0, -1.0];
        poles.extend(model.spikes().iter().map(|s| -1.0 / s.alpha));
        poles.sort_by(f64::total_cmp);
        poles.dedup();
        Self { model: model.clone(), poles }
    }

    pub fn model(&self) -> &SpikedModel {
        &self.model
    }

    /// Sorted pole set `{0, -1, -1/a_j}`.
    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    fn guard(&self, m: f64) -> Result<()> {
        for &pole in &self.poles {
            let distance = (m - pole).abs();
            if distance < POLE_GUARD * pole.abs().max(1.0) {
                return Err(Error::PoleEvaluation { m, pole, distance });
            }
        }
        Ok(())
    }

    pub fn z(&self, m: f64) -> Result<f64> {
        self.guard(m)?;
        Ok(self.z_unchecked(m))
    }

    pub fn z_prime(&self, m: f64) -> Result<f64> {
        self.guard(m)?;
        Ok(self.z_prime_unchecked(m))
    }

    fn z_unchecked(&self, m: f64) -> f64 {
        let model = &self.model;
        let n = model.n() as f64;
        let spikes: f64 = model
            .spikes()
            .iter()
            .map(|s| s.multiplicity as f64 * s.alpha / (1.0 + s.alpha * m))
            .sum();
        -1.0 / m + model.c_p() / (1.0 + m) + (spikes - model.r() as f64 / (1.0 + m)) / n
    }

    fn z_prime_unchecked(&self, m: f64) -> f64 {
        let model = &self.model;
        let n = model.n() as f64;
        let spikes: f64 = model
            .spikes()
            .iter()
            .map(|s| {
                let d = 1.0 + s.alpha * m;
                -(s.multiplicity as f64) * s.alpha * s.alpha / (d * d)
            })
            .sum();
        let one = (1.0 + m) * (1.0 + m);
        1.0 / (m * m) - model.c_p() / one + (spikes + model.r() as f64 / one) / n
    }

    /// Denominator `m^2 (1+m)^2 prod_l (1 + a_l m)^2` of `z_p'`.
    pub fn denominator(&self, m: f64) -> f64 {
        let prod: f64 = self.model.spikes().iter().map(|s| (1.0 + s.alpha * m).powi(2)).product();
        m * m * (1.0 + m) * (1.0 + m) * prod
    }
}

/// `z_p(m)` for `model`.
pub fn z_p(model: &SpikedModel, m: f64) -> Result<f64> {
    RationalInverse::new(model).z(m)
}

/// `z_p'(m)` for `model`.
pub fn z_p_prime(model: &SpikedModel, m: f64) -> Result<f64> {
    RationalInverse::new(model).z_prime(m)
}

/// Rejects models for which the support structure is undefined and returns
/// warnings for ones that are merely ill-conditioned.
pub fn check_nondegenerate(model: &SpikedModel) -> Result<Vec<String>> {
    let c = model.c_p();
    if (c - 1.0).abs() < DEGENERACY_TOL {
        return Err(Error::Degenerate(format!("c_p = {c} is too close to 1")));
    }
    if model.r() == model.p() {
        return Err(Error::Degenerate(
            "every population eigenvalue is a spike (r = p); no unit eigenvalues remain".into(),
        ));
    }
    let mut warnings = Vec::new();
    for (j, s) in model.spikes().iter().enumerate() {
        for threshold in [1.0 + c.sqrt(), 1.0 - c.sqrt()] {
            let gap = (s.alpha - threshold).abs();
            if gap < DEGENERACY_TOL {
                return Err(Error::Degenerate(format!(
                    "spike {} = {} coincides with the threshold {threshold}",
                    j + 1,
                    s.alpha
                )));
            }
            if gap < NEAR_DEGENERACY_TOL {
                warnings.push(format!(
                    "spike {} = {} is within {gap:e} of the threshold {threshold}; \
                     gap widths are below numerical resolution",
                    j + 1,
                    s.alpha
                ));
            }
        }
    }
    Ok(warnings)
}

/// Numerator `f + g/n` of `z_p'` in the monomial basis, degree `2M + 2`.
pub fn numerator_polynomial(model: &SpikedModel) -> Result<Poly> {
    check_nondegenerate(model)?;
    let c = model.c_p();
    let n = model.n() as f64;
    let factors: Vec<Poly> =
        model.spikes().iter().map(|s| Poly::linear(1.0, s.alpha).pow(2)).collect();
    let product = factors.iter().fold(Poly::constant(1.0), |acc, f| &acc * f);

    let f = &Poly::new(vec![1.0, 2.0, 1.0 - c]) * &product;

    let m2 = Poly::new(vec![0.0, 0.0, 1.0]);
    let m2_one2 = &m2 * &Poly::linear(1.0, 1.0).pow(2);
    let mut g = (&m2 * &product).scale(model.r() as f64);
    for (j, s) in model.spikes().iter().enumerate() {
        let others = factors
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != j)
            .fold(Poly::constant(1.0), |acc, (_, f)| &acc * f);
        let term = (&m2_one2 * &others).scale(-(s.multiplicity as f64) * s.alpha * s.alpha);
        g = &g + &term;
    }
    Ok(&f + &g.scale(1.0 / n))
}

/// Which perturbed root of `f` a critical point descends from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootLabel {
    /// Near `-1/(1 + sqrt c_p)`.
    MPlus,
    /// Near `-1/(1 - sqrt c_p)`.
    MMinus,
    /// Left of `-1/a_j` (0-based spike index).
    SpikeMinus(usize),
    /// Right of `-1/a_j`.
    SpikePlus(usize),
}

impl fmt::Display for RootLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootLabel::MPlus => f.write_str("m+"),
            RootLabel::MMinus => f.write_str("m-"),
            RootLabel::SpikeMinus(j) => write!(f, "m{},-", j + 1),
            RootLabel::SpikePlus(j) => write!(f, "m{},+", j + 1),
        }
    }
}

impl Serialize for RootLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabeledRoot {
    pub label: RootLabel,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoints {
    /// Ascending.
    pub real_roots: Vec<LabeledRoot>,
    pub complex_pair_count: usize,
    pub degree: usize,
    /// Whether the companion-matrix eigenvalues reproduce `real_roots`.
    pub companion_agrees: bool,
}

impl CriticalPoints {
    pub fn values(&self) -> Vec<f64> {
        self.real_roots.iter().map(|r| r.m).collect()
    }

    pub fn get(&self, label: RootLabel) -> Option<f64> {
        self.real_roots.iter().find(|r| r.label == label).map(|r| r.m)
    }
}

fn m_plus_minus(c: f64) -> (f64, f64) {
    (-1.0 / (1.0 + c.sqrt()), -1.0 / (1.0 - c.sqrt()))
}

/// Real roots of `z_p'`, isolated on the rational form and checked against
/// the companion-matrix eigenvalues of the numerator polynomial.
///
/// `z_p'(m) = 0` exactly when `g(m) = sum_k w_k (a_k m / (1 + a_k m))^2 = 1`,
/// with the bulk entering as `a = 1`, `w = (p - r)/n`. Each term of `g` is
/// convex on every pole-free piece of `m < 0` and increasing on `m > 0`, so a
/// piece between two poles holds zero or two roots, the outer negative piece
/// at most one and `m > 0` at most one. Unlike the expanded numerator this
/// stays well conditioned when many spikes crowd the poles together.
pub fn critical_points(model: &SpikedModel) -> Result<CriticalPoints> {
    let numerator = numerator_polynomial(model)?;
    let degree = numerator.degree();
    let real = RootEquation::new(model).roots();
    if real.len() > degree || !(degree - real.len()).is_multiple_of(2) {
        return Err(Error::RootIsolation(format!(
            "found {} real roots for a numerator of degree {degree}",
            real.len()
        )));
    }
    let companion_agrees = companion_agrees(&numerator, &real);
    let complex_pair_count = (degree - real.len()) / 2;
    let labels = label_roots(model, &real);
    Ok(CriticalPoints {
        real_roots: real.into_iter().zip(labels).map(|(m, label)| LabeledRoot { label, m }).collect(),
        complex_pair_count,
        degree,
        companion_agrees,
    })
}

/// Whether the companion matrix of `numerator` reproduces `real`. Expanding
/// the numerator loses accuracy as spikes multiply, so disagreement is
/// reported rather than treated as an error.
fn companion_agrees(numerator: &Poly, real: &[f64]) -> bool {
    let mut companion = numerator.companion_roots();
    companion.sort_by(|a, b| scaled_im(a).total_cmp(&scaled_im(b)));
    let count = companion.iter().filter(|z| scaled_im(z) <= COMPLEX_IM_TOL).count();
    if count != real.len() {
        return false;
    }
    let mut polished: Vec<f64> = companion[..count].iter().map(|z| numerator.polish(z.re, 4)).collect();
    polished.sort_by(f64::total_cmp);
    real.iter().zip(&polished).all(|(a, b)| (a - b).abs() <= CROSS_CHECK_TOL * a.abs().max(1.0))
}

/// `g(m) = sum_k w_k t_k(m)^2` with `t_k = a_k m / (1 + a_k m)`.
struct RootEquation {
    terms: Vec<(f64, f64)>,
    /// Distinct negative poles `-1/a_k`, ascending.
    poles: Vec<f64>,
    c: f64,
}

impl RootEquation {
    fn new(model: &SpikedModel) -> Self {
        let n = model.n() as f64;
        let mut terms = vec![(1.0, (model.p() - model.r()) as f64 / n)];
        terms.extend(model.spikes().iter().map(|s| (s.alpha, s.multiplicity as f64 / n)));
        let mut poles: Vec<f64> = terms.iter().map(|(a, _)| -1.0 / a).collect();
        poles.sort_by(f64::total_cmp);
        poles.dedup();
        Self { terms, poles, c: model.c_p() }
    }

    fn g(&self, m: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, w)| {
                let t = a * m / (1.0 + a * m);
                w * t * t
            })
            .sum()
    }

    fn g_prime(&self, m: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, w)| {
                let d = 1.0 + a * m;
                2.0 * w * a * a * m / (d * d * d)
            })
            .sum()
    }

    /// All real roots of `g = 1`, ascending.
    fn roots(&self) -> Vec<f64> {
        let below = |m: f64| self.g(m) < 1.0;
        let first = self.poles[0];
        let last = *self.poles.last().expect("the bulk pole is always present");
        let mut roots = Vec::new();
        if self.c < 1.0 {
            // g rises from c at -inf to +inf at the first pole.
            let mut step = first.abs().max(1.0);
            while !below(first - step) {
                step *= 2.0;
            }
            roots.push(bisect_sign(&below, first - step, first));
        }
        for w in self.poles.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let dip = bisect_sign(&|m| self.g_prime(m) < 0.0, lo, hi);
            if below(dip) {
                roots.push(bisect_sign(&below, dip, lo));
                roots.push(bisect_sign(&below, dip, hi));
            }
        }
        // g falls from +inf at the last pole to 0 at m = 0.
        roots.push(bisect_sign(&below, 0.0, last));
        if self.c > 1.0 {
            // g rises from 0 to c on m > 0.
            let mut step = 1.0;
            while below(step) {
                step *= 2.0;
            }
            roots.push(bisect_sign(&below, 0.0, step));
        }
        roots
    }
}

/// Boundary of `{pred}` between `inside` (where `pred` holds) and `outside`,
/// in either order, to `ROOT_REL_TOL`.
fn bisect_sign(pred: &dyn Fn(f64) -> bool, mut inside: f64, mut outside: f64) -> f64 {
    loop {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside || (outside - inside).abs() <= ROOT_REL_TOL * mid.abs() {
            return mid;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
}

fn scaled_im(z: &nalgebra::Complex<f64>) -> f64 {
    z.im.abs() / z.norm().max(1.0)
}

/// Roots predicted real by the classification, sorted by their anchors.
fn expected_real_labels(model: &SpikedModel) -> Vec<(f64, u8, RootLabel)> {
    let c = model.c_p();
    let (mp, mm) = m_plus_minus(c);
    let mut anchors = vec![(mp, 0, RootLabel::MPlus), (mm, 0, RootLabel::MMinus)];
    for (j, s) in model.spikes().iter().enumerate() {
        if classify(s.alpha, c).is_separated() {
            anchors.push((-1.0 / s.alpha, 0, RootLabel::SpikeMinus(j)));
            anchors.push((-1.0 / s.alpha, 1, RootLabel::SpikePlus(j)));
        }
    }
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    anchors
}

fn label_roots(model: &SpikedModel, roots: &[f64]) -> Vec<RootLabel> {
    let expected = expected_real_labels(model);
    if expected.len() == roots.len() {
        return expected.into_iter().map(|(_, _, l)| l).collect();
    }
    // Pattern differs from the asymptotic one; fall back to nearest anchor.
    let c = model.c_p();
    let (mp, mm) = m_plus_minus(c);
    roots
        .iter()
        .map(|&m| {
            let mut best = ((m - mp).abs(), RootLabel::MPlus);
            if (m - mm).abs() < best.0 {
                best = ((m - mm).abs(), RootLabel::MMinus);
            }
            for (j, s) in model.spikes().iter().enumerate() {
                let anchor = -1.0 / s.alpha;
                if (m - anchor).abs() < best.0 {
                    let label =
                        if m < anchor { RootLabel::SpikeMinus(j) } else { RootLabel::SpikePlus(j) };
                    best = ((m - anchor).abs(), label);
                }
            }
            best.1
        })
        .collect()
}

/// `G_j(-1/a_j)`; positive exactly when spike `j` separates.
pub fn g_at_pole(model: &SpikedModel, j: usize) -> f64 {
    let c = model.c_p();
    let (mp, mm) = m_plus_minus(c);
    let s = model.spikes()[j];
    let a = s.alpha;
    let m0 = -1.0 / a;
    s.multiplicity as f64 * (a - 1.0).powi(2) / (a.powi(4) * (1.0 - c) * (m0 - mp) * (m0 - mm))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeRootApprox {
    pub spike: usize,
    pub g_at_pole: f64,
    /// `(m_{j,-}, m_{j,+})`; absent when `g_at_pole < 0` (complex pair).
    pub pair: Option<(f64, f64)>,
}

/// Leading-order approximations of the critical points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRoots {
    pub m_plus: f64,
    pub m_minus: f64,
    pub spikes: Vec<SpikeRootApprox>,
}

impl AsymptoticRoots {
    pub fn get(&self, label: RootLabel) -> Option<f64> {
        match label {
            RootLabel::MPlus => Some(self.m_plus),
            RootLabel::MMinus => Some(self.m_minus),
            RootLabel::SpikeMinus(j) => self.spikes.get(j)?.pair.map(|p| p.0),
            RootLabel::SpikePlus(j) => self.spikes.get(j)?.pair.map(|p| p.1),
        }
    }
}

/// `m_+- ~ -1/(1 +- sqrt c_p)` and `m_{j,+-} ~ -1/a_j +- sqrt(G_j(-1/a_j)/n)`.
pub fn asymptotic_roots(model: &SpikedModel) -> Result<AsymptoticRoots> {
    check_nondegenerate(model)?;
    let (m_plus, m_minus) = m_plus_minus(model.c_p());
    let n = model.n() as f64;
    let spikes = (0..model.num_spikes())
        .map(|j| {
            let g = g_at_pole(model, j);
            let center = -1.0 / model.spikes()[j].alpha;
            let pair = (g > 0.0).then(|| {
                let d = (g / n).sqrt();
                (center - d, center + d)
            });
            SpikeRootApprox { spike: j, g_at_pole: g, pair }
        })
        .collect();
    Ok(AsymptoticRoots { m_plus, m_minus, spikes })
}

/// Predicted edges `z_{j,-}, z_{j,+}` of the support component around the
/// spike's limit `a_j + c_p a_j/(a_j - 1)`, to order `1/sqrt(n)`.
pub fn spike_gap_edges(model: &SpikedModel, j: usize) -> Result<(f64, f64)> {
    let c = model.c_p();
    let s = *model
        .spikes()
        .get(j)
        .ok_or_else(|| Error::InvalidArgument(format!("no spike with index {j}")))?;
    if !classify(s.alpha, c).is_separated() {
        return Err(Error::BulkSpike { index: j, c });
    }
    check_nondegenerate(model)?;
    let a = s.alpha;
    let cj = g_at_pole(model, j).sqrt();
    let big_a = (cj * cj * a * a * (1.0 - c / (a - 1.0).powi(2)) + s.multiplicity as f64) / cj;
    let center = a + c * a / (a - 1.0);
    let half = big_a / (model.n() as f64).sqrt();
    Ok((center - half, center + half))
}

/// One interval of `supp(F_p)^c` and the `m`-interval it is the image of.
/// Unbounded ends are infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementInterval {
    pub lo: f64,
    pub hi: f64,
    pub m_lo: f64,
    pub m_hi: f64,
}

impl ComplementInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub label: RootLabel,
    pub m: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub p: usize,
    pub n: usize,
    pub c_p: f64,
    /// Ascending and pairwise disjoint.
    pub complement: Vec<ComplementInterval>,
    /// Images of the real critical points, ascending in `m`.
    pub edges: Vec<Edge>,
    pub critical_points: CriticalPoints,
    pub warnings: Vec<String>,
}

impl SupportReport {
    pub fn in_complement(&self, x: f64) -> bool {
        self.complement.iter().any(|i| i.contains(x))
    }

    /// Closed components of the support with positive length.
    pub fn support_intervals(&self) -> Vec<(f64, f64)> {
        self.complement
            .windows(2)
            .filter(|w| w[0].hi < w[1].lo)
            .map(|w| (w[0].hi, w[1].lo))
            .collect()
    }

    pub fn edge(&self, label: RootLabel) -> Option<f64> {
        self.edges.iter().find(|e| e.label == label).map(|e| e.x)
    }
}

/// Number of complement intervals implied by the spike classification.
pub fn expected_interval_count(model: &SpikedModel) -> usize {
    let c = model.c_p();
    let (mut above, mut below) = (0, 0);
    for s in model.spikes() {
        match classify(s.alpha, c).regime {
            Regime::Supercritical => above += 1,
            Regime::Subcritical => below += 1,
            Regime::Bulk => {}
        }
    }
    if c < 1.0 {
        3 + above + below
    } else {
        2 + above
    }
}

/// Computes `supp(F_p)^c` from the sign pattern of `z_p'`.
pub fn support_complement(model: &SpikedModel) -> Result<SupportReport> {
    let mut warnings = check_nondegenerate(model)?;
    let critical = critical_points(model)?;
    if !critical.companion_agrees {
        warnings.push(format!(
            "companion-matrix roots of the degree-{} numerator disagree with the isolated roots; \
             the expanded polynomial is ill-conditioned for this model",
            critical.degree
        ));
    }
    let inverse = RationalInverse::new(model);

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Pole,
        Root,
    }
    let mut breaks: Vec<(f64, Kind)> = inverse
        .poles()
        .iter()
        .map(|&p| (p, Kind::Pole))
        .chain(critical.real_roots.iter().map(|r| (r.m, Kind::Root)))
        .collect();
    breaks.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut complement = Vec::new();
    for i in 0..=breaks.len() {
        let lo = if i == 0 { None } else { Some(breaks[i - 1]) };
        let hi = breaks.get(i).copied();
        let probe = match (lo, hi) {
            (Some((a, _)), Some((b, _))) => 0.5 * (a + b),
            (None, Some((b, _))) => b - b.abs().max(1.0),
            (Some((a, _)), None) => a + a.abs().max(1.0),
            (None, None) => unreachable!("the pole set is never empty"),
        };
        if inverse.z_prime(probe)? <= 0.0 {
            continue;
        }
        let x_lo = match lo {
            None => 0.0,
            Some((_, Kind::Pole)) => f64::NEG_INFINITY,
            Some((m, Kind::Root)) => inverse.z(m)?,
        };
        let x_hi = match hi {
            None => 0.0,
            Some((_, Kind::Pole)) => f64::INFINITY,
            Some((m, Kind::Root)) => inverse.z(m)?,
        };
        complement.push(ComplementInterval {
            lo: x_lo,
            hi: x_hi,
            m_lo: lo.map_or(f64::NEG_INFINITY, |b| b.0),
            m_hi: hi.map_or(f64::INFINITY, |b| b.0),
        });
    }
    complement.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for w in complement.windows(2) {
        if !(w[0].lo < w[0].hi && w[0].hi <= w[1].lo) {
            return Err(Error::RootIsolation(format!(
                "complement intervals ({}, {}) and ({}, {}) are not disjoint and ordered",
                w[0].lo, w[0].hi, w[1].lo, w[1].hi
            )));
        }
    }

    let expected = expected_interval_count(model);
    if complement.len() != expected {
        return Err(Error::Inconsistent { expected, found: complement.len() });
    }

    let edges = critical
        .real_roots
        .iter()
        .map(|r| Ok(Edge { label: r.label, m: r.m, x: inverse.z(r.m)? }))
        .collect::<Result<Vec<_>>>()?;

    Ok(SupportReport {
        p: model.p(),
        n: model.n(),
        c_p: model.c_p(),
        complement,
        edges,
        critical_points: critical,
        warnings,
    })
}

/// Solves `z_p(m) = x` by bisection on an `m`-interval where `z_p` is
/// increasing. Returns `None` when `x` is not attained there.
pub fn invert_on(model: &SpikedModel, x: f64, m_lo: f64, m_hi: f64) -> Option<f64> {
    let inverse = RationalInverse::new(model);
    let finite = |m: f64, other: f64| {
        if m.is_finite() {
            m
        } else {
            other + m.signum() * 1e12 * other.abs().max(1.0)
        }
    };
    let (lo, hi) = (finite(m_lo, m_hi), finite(m_hi, m_lo));
    // Step off poles by a relative amount tied to the finite endpoint itself.
    let width = if m_lo.is_finite() && m_hi.is_finite() { hi - lo } else { f64::INFINITY };
    let inset = |m: f64| (1e-13 * m.abs().max(1.0)).min(1e-3 * width);
    let (mut a, mut b) = (lo + inset(lo), hi - inset(hi));
    if !(inverse.z(a).ok()? <= x && x <= inverse.z(b).ok()?) {
        return None;
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Some(mid);
        }
        if inverse.z(mid).ok()? < x {
            a = mid;
        } else {
            b = mid;
        }
    }
}
