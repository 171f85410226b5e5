//! Spiked population model: population spikes, dimensions, entry
//! distributions and the phase-transition classification of each spike.
//!
//! The population covariance is always taken diagonal,
//! `T = diag(alpha_1 (k_1 times), ..., alpha_M (k_M times), 1, ..., 1)`;
//! every quantity in this crate depends only on its spectrum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One non-unit population eigenvalue together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeSpec {
    pub alpha: f64,
    pub multiplicity: usize,
}

impl SpikeSpec {
    pub fn new(alpha: f64, multiplicity: usize) -> Self {
        Self { alpha, multiplicity }
    }
}

impl fmt::Display for SpikeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicity == 1 {
            write!(f, "{}", self.alpha)
        } else {
            write!(f, "{}:{}", self.alpha, self.multiplicity)
        }
    }
}

/// Parses `value` or `value:multiplicity`.
impl FromStr for SpikeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SpikeSyntax(s.to_string());
        let (value, mult) = match s.trim().split_once(':') {
            Some((v, k)) => (v.trim(), k.trim().parse::<usize>().map_err(|_| bad())?),
            None => (s.trim(), 1),
        };
        let alpha: f64 = value.parse().map_err(|_| bad())?;
        if !alpha.is_finite() {
            return Err(bad());
        }
        Ok(SpikeSpec::new(alpha, mult))
    }
}

/// A reason a [`SpikedModel`] is not admissible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NonPositiveAlpha { index: usize, alpha: f64 },
    UnitAlpha { index: usize },
    ZeroMultiplicity { index: usize },
    TooManySpikes { r: usize, p: usize },
    ZeroPopulation,
    ZeroSamples,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveAlpha { index, alpha } => {
                write!(f, "spike {index} has non-positive value {alpha}")
            }
            Violation::UnitAlpha { index } => write!(f, "spike {index} equals 1"),
            Violation::ZeroMultiplicity { index } => {
                write!(f, "spike {index} has multiplicity 0")
            }
            Violation::TooManySpikes { r, p } => {
                write!(f, "total spike multiplicity {r} exceeds p = {p}")
            }
            Violation::ZeroPopulation => write!(f, "p must be at least 1"),
            Violation::ZeroSamples => write!(f, "n must be at least 1"),
        }
    }
}

/// Outcome of [`validate`]. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Population spikes plus the dimensions `p` (variables) and `n` (samples).
///
/// Spikes are kept sorted strictly decreasing; equal values are merged by
/// summing their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct SpikedModel {
    spikes: Vec<SpikeSpec>,
    p: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    spikes: Vec<SpikeSpec>,
    p: usize,
    n: usize,
}

impl TryFrom<RawModel> for SpikedModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        SpikedModel::new(raw.spikes, raw.p, raw.n)
    }
}

impl From<SpikedModel> for RawModel {
    fn from(m: SpikedModel) -> Self {
        RawModel { spikes: m.spikes, p: m.p, n: m.n }
    }
}

impl SpikedModel {
    /// Canonicalizes and validates. Fails with [`Error::InvalidModel`].
    pub fn new(spikes: impl IntoIterator<Item = SpikeSpec>, p: usize, n: usize) -> Result<Self> {
        let model = Self::unchecked(spikes, p, n);
        let verdict = validate(&model);
        if verdict.is_accepted() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(verdict.violations))
        }
    }

    /// Canonicalizes without validating; pair with [`validate`].
    pub fn unchecked(spikes: impl IntoIterator<Item = SpikeSpec>, p: usize, n: usize) -> Self {
        let mut spikes: Vec<SpikeSpec> = spikes.into_iter().collect();
        spikes.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));
        let mut merged: Vec<SpikeSpec> = Vec::with_capacity(spikes.len());
        for s in spikes {
            match merged.last_mut() {
                Some(last) if last.alpha == s.alpha => last.multiplicity += s.multiplicity,
                _ => merged.push(s),
            }
        }
        Self { spikes: merged, p, n }
    }

    /// Null model: identity population covariance.
    pub fn null(p: usize, n: usize) -> Result<Self> {
        Self::new([], p, n)
    }

    pub fn spikes(&self) -> &[SpikeSpec] {
        &self.spikes
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Aspect ratio `c_p = p / n`.
    pub fn c_p(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Total spike multiplicity `r`.
    pub fn r(&self) -> usize {
        self.spikes.iter().map(|s| s.multiplicity).sum()
    }

    /// Number of distinct spikes `M`.
    pub fn num_spikes(&self) -> usize {
        self.spikes.len()
    }

    /// Diagonal of the population covariance: spikes first, then ones.
    pub fn population_diagonal(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.p);
        for s in &self.spikes {
            d.extend(std::iter::repeat_n(s.alpha, s.multiplicity));
        }
        d.resize(self.p.max(d.len()), 1.0);
        d
    }

    /// Same spikes with different dimensions.
    pub fn with_dims(&self, p: usize, n: usize) -> Result<Self> {
        Self::new(self.spikes.iter().copied(), p, n)
    }
}

/// Checks every model invariant and reports all violations found.
pub fn validate(model: &SpikedModel) -> ValidationResult {
    let mut violations = Vec::new();
    if model.p == 0 {
        violations.push(Violation::ZeroPopulation);
    }
    if model.n == 0 {
        violations.push(Violation::ZeroSamples);
    }
    for (index, s) in model.spikes.iter().enumerate() {
        if !(s.alpha > 0.0) {
            violations.push(Violation::NonPositiveAlpha { index, alpha: s.alpha });
        } else if s.alpha == 1.0 {
            violations.push(Violation::UnitAlpha { index });
        }
        if s.multiplicity == 0 {
            violations.push(Violation::ZeroMultiplicity { index });
        }
    }
    let r = model.r();
    if r > model.p {
        violations.push(Violation::TooManySpikes { r, p: model.p });
    }
    ValidationResult { violations }
}

/// Distribution of the i.i.d. entries `Z_ij`: mean 0, `E|Z|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EntryDistribution {
    #[default]
    #[serde(rename = "gaussian", alias = "real-gaussian")]
    RealGaussian,
    /// Independent real and imaginary parts, each of variance 1/2.
    #[serde(rename = "cgaussian", alias = "complex-gaussian")]
    ComplexGaussian,
    /// `+1` or `-1` with probability 1/2 each.
    #[serde(rename = "rademacher", alias = "bernoulli")]
    Rademacher,
}

impl EntryDistribution {
    pub fn is_complex(self) -> bool {
        matches!(self, EntryDistribution::ComplexGaussian)
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryDistribution::RealGaussian => "gaussian",
            EntryDistribution::ComplexGaussian => "cgaussian",
            EntryDistribution::Rademacher => "rademacher",
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "real-gaussian" => Ok(EntryDistribution::RealGaussian),
            "cgaussian" | "complex-gaussian" => Ok(EntryDistribution::ComplexGaussian),
            "rademacher" | "bernoulli" => Ok(EntryDistribution::Rademacher),
            other => Err(Error::InvalidArgument(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `alpha > 1 + sqrt(c)`: a sample eigenvalue separates above the bulk.
    Supercritical,
    /// `1 - sqrt(c) <= alpha <= 1 + sqrt(c)`: absorbed by the bulk.
    Bulk,
    /// `alpha < 1 - sqrt(c)` (requires `c < 1`): separates below the bulk.
    Subcritical,
}

/// Almost-sure limit of the sample eigenvalues attached to a spike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpikeLimit {
    Value(f64),
    BulkEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeClassification {
    pub regime: Regime,
    pub limit: SpikeLimit,
}

impl SpikeClassification {
    pub fn is_separated(&self) -> bool {
        self.regime != Regime::Bulk
    }

    pub fn limit_value(&self) -> Option<f64> {
        match self.limit {
            SpikeLimit::Value(v) => Some(v),
            SpikeLimit::BulkEdge => None,
        }
    }
}

/// Places `alpha` relative to the thresholds `1 +- sqrt(c)`; values exactly
/// on a threshold count as bulk.
pub fn classify(alpha: f64, c: f64) -> SpikeClassification {
    let root = c.sqrt();
    let regime = if alpha > 1.0 + root {
        Regime::Supercritical
    } else if alpha < 1.0 - root {
        Regime::Subcritical
    } else {
        Regime::Bulk
    };
    let limit = match regime {
        Regime::Bulk => SpikeLimit::BulkEdge,
        _ => SpikeLimit::Value(alpha + c * alpha / (alpha - 1.0)),
    };
    SpikeClassification { regime, limit }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spikes(v: &[(f64, usize)]) -> Vec<SpikeSpec> {
        v.iter().map(|&(a, k)| SpikeSpec::new(a, k)).collect()
    }

    #[test]
    fn accepts_table_model() {
        let m = SpikedModel::unchecked(spikes(&[(4.0, 1), (3.0, 1), (0.1, 1)]), 1000, 2000);
        assert!(validate(&m).is_accepted());
        assert_eq!(m.r(), 3);
        assert_eq!(m.c_p(), 0.5);
    }

    #[test]
    fn rejects_unit_spike() {
        let m = SpikedModel::unchecked(spikes(&[(1.0, 1)]), 10, 10);
        let v = validate(&m);
        assert_eq!(v.violations, vec![Violation::UnitAlpha { index: 0 }]);
        assert!(SpikedModel::new(spikes(&[(1.0, 1)]), 10, 10).is_err());
    }

    #[test]
    fn rejects_excess_multiplicity() {
        let m = SpikedModel::unchecked(spikes(&[(2.0, 11)]), 10, 10);
        assert_eq!(validate(&m).violations, vec![Violation::TooManySpikes { r: 11, p: 10 }]);
    }

    #[test]
    fn reports_every_violation() {
        let m = SpikedModel::unchecked(spikes(&[(-2.0, 0), (1.0, 1)]), 0, 0);
        let v = validate(&m).violations;
        assert_eq!(v.len(), 6, "{v:?}");
    }

    #[test]
    fn canonicalizes_order_and_duplicates() {
        let m = SpikedModel::new(spikes(&[(0.1, 1), (4.0, 1), (3.0, 2), (4.0, 2)]), 50, 100)
            .unwrap();
        assert_eq!(m.spikes(), &spikes(&[(4.0, 3), (3.0, 2), (0.1, 1)])[..]);
        assert_eq!(m.population_diagonal()[..7], [4.0, 4.0, 4.0, 3.0, 3.0, 0.1, 1.0]);
        assert_eq!(m.population_diagonal().len(), 50);
    }

    #[test]
    fn parses_spike_strings() {
        assert_eq!("4".parse::<SpikeSpec>().unwrap(), SpikeSpec::new(4.0, 1));
        assert_eq!("3:2".parse::<SpikeSpec>().unwrap(), SpikeSpec::new(3.0, 2));
        assert_eq!(" 0.1 : 3 ".parse::<SpikeSpec>().unwrap(), SpikeSpec::new(0.1, 3));
        assert!("x".parse::<SpikeSpec>().is_err());
        assert!("3:".parse::<SpikeSpec>().is_err());
        assert!("3:-1".parse::<SpikeSpec>().is_err());
        assert!("inf".parse::<SpikeSpec>().is_err());
        assert_eq!(SpikeSpec::new(3.0, 2).to_string(), "3:2");
    }

    #[test]
    fn classify_table_values() {
        let c = classify(4.0, 0.5);
        assert_eq!(c.regime, Regime::Supercritical);
        assert!((c.limit_value().unwrap() - 4.666667).abs() < 5e-7);

        let c = classify(0.1, 0.5);
        assert_eq!(c.regime, Regime::Subcritical);
        assert!((c.limit_value().unwrap() - 0.044444).abs() < 5e-7);

        let c = classify(1.5, 0.5);
        assert_eq!(c.regime, Regime::Bulk);
        assert_eq!(c.limit, SpikeLimit::BulkEdge);

        let c = classify(3.0, 2.0);
        assert_eq!(c.regime, Regime::Supercritical);
        assert!((c.limit_value().unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn model_json_rejects_invalid() {
        let ok: SpikedModel =
            serde_json::from_str(r#"{"spikes":[{"alpha":3.0,"multiplicity":1}],"p":10,"n":20}"#)
                .unwrap();
        assert_eq!(ok.r(), 1);
        let bad = serde_json::from_str::<SpikedModel>(
            r#"{"spikes":[{"alpha":1.0,"multiplicity":1}],"p":10,"n":20}"#,
        );
        assert!(bad.is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn upper_threshold_is_bulk(c in 1e-3f64..50.0) {
                prop_assert_eq!(classify(1.0 + c.sqrt(), c).regime, Regime::Bulk);
            }

            #[test]
            fn never_subcritical_above_one(c in 1.0f64..50.0, alpha in 1e-6f64..100.0) {
                prop_assert_ne!(classify(alpha, c).regime, Regime::Subcritical);
            }

            #[test]
            fn limit_increases_above_threshold(c in 1e-3f64..10.0, a in 0.0f64..20.0, d in 1e-6f64..5.0) {
                let lo = 1.0 + c.sqrt() + 1e-9 + a;
                let x = classify(lo, c).limit_value().unwrap();
                let y = classify(lo + d, c).limit_value().unwrap();
                prop_assert!(y > x);
            }
        }
    }
}
