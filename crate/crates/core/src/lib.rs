//! Spiked population covariance models: limiting sample eigenvalues,
//! support of the limiting spectral distribution, the Marchenko–Pastur law,
//! and a Monte Carlo simulator to check them against.
//!
//! ```
//! use spiked_core::{predict, support_complement, SpikeSpec, SpikedModel};
//!
//! let model = SpikedModel::new(
//!     [SpikeSpec::new(4.0, 1), SpikeSpec::new(3.0, 1), SpikeSpec::new(0.1, 1)],
//!     1000,
//!     2000,
//! )?;
//! let report = predict(&model, model.c_p())?;
//! assert!((report.entries[0].limit - 14.0 / 3.0).abs() < 1e-12);
//! let support = support_complement(&model)?;
//! assert_eq!(support.complement.len(), 6);
//! # Ok::<(), spiked_core::Error>(())
//! ```

pub mod error;
pub mod limits;
pub mod model;
pub mod mplaw;
pub mod poly;
pub mod quadrature;
pub mod simulate;
pub mod support;

pub use error::{Error, Result};
pub use limits::{
    predict, predict_limits, spike_limit, AspectRegime, EntryKind, PredictionEntry,
    PredictionReport, Rank,
};
pub use model::{
    classify, validate, EntryDistribution, Regime, SpikeClassification, SpikeLimit, SpikeSpec,
    SpikedModel, ValidationResult, Violation,
};
pub use mplaw::{companion_law_convert, companion_mp_cdf, mp_cdf, mp_density, mp_edges, MpLaw};
pub use simulate::{
    histogram, monte_carlo, run_trials, sample_eigenvalues, separation_check, summarize, EigenSample,
    Histogram, IndexStats, MonteCarloSummary, SeparationCheck, TrialRow,
};
pub use support::{
    asymptotic_roots, critical_points, spike_gap_edges, support_complement, z_p, z_p_prime,
    ComplementInterval, CriticalPoints, Edge, RootLabel, SupportReport,
};
