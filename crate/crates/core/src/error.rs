use thiserror::Error;

use crate::model::Violation;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {}", format_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("invalid spike specification `{0}`")]
    SpikeSyntax(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("z_p evaluated at m = {m}, within {distance:e} of the pole {pole}")]
    PoleEvaluation { m: f64, pole: f64, distance: f64 },

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("root isolation failed: {0}")]
    RootIsolation(String),

    #[error("support structure inconsistent with spike classification: expected {expected} complement intervals, found {found}")]
    Inconsistent { expected: usize, found: usize },

    #[error("spike {index} lies inside the bulk for c = {c}; it has no separated gap")]
    BulkSpike { index: usize, c: f64 },

    #[error("eigensolver failed to converge (seed {seed}): {reason}")]
    EigenSolver { seed: u64, reason: String },

    #[error("CDF value {value} outside [0, 1]; inputs are inconsistent")]
    CdfOutOfRange { value: f64 },
}

impl Error {
    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RootIsolation(_) | Error::Inconsistent { .. } | Error::EigenSolver { .. }
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
