//! Marchenko–Pastur law for unit population variance.
//!
//! `mp_density` returns only the absolutely continuous part. Point masses at
//! zero are reported through [`MpLaw::atom_mass_at_zero`] (law of the `p x p`
//! sample covariance) and [`MpLaw::companion_atom_mass`] (law of the `n x n`
//! companion matrix).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

const CDF_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpLaw {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub atom_mass_at_zero: f64,
}

impl MpLaw {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
        }
        let (a, b) = mp_edges(c);
        Ok(Self { c, a, b, atom_mass_at_zero: (1.0 - 1.0 / c).max(0.0) })
    }

    /// Mass at zero of the companion law `F_inf`.
    pub fn companion_atom_mass(&self) -> f64 {
        (1.0 - self.c).max(0.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        mp_density(x, self.c)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        mp_cdf(x, self.c)
    }
}

/// Bulk edges `((1 - sqrt c)^2, (1 + sqrt c)^2)`.
pub fn mp_edges(c: f64) -> (f64, f64) {
    let s = c.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Continuous part of the density, zero outside the open bulk `(a, b)`.
pub fn mp_density(x: f64, c: f64) -> f64 {
    let (a, b) = mp_edges(c);
    if x <= a || x >= b || x <= 0.0 {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * PI * x * c)
}

/// `P(X <= x)` for the limit law of the `p x p` sample covariance, including
/// the atom `1 - 1/c` at zero when `c > 1`.
pub fn mp_cdf(x: f64, c: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let (a, b) = mp_edges(c);
    let atom = (1.0 - 1.0 / c).max(0.0);
    if x <= a {
        return atom;
    }
    if x >= b {
        return 1.0;
    }
    (atom + continuous_mass(x, a, b, c)).clamp(0.0, 1.0)
}

/// `int_a^x density` under `x = a + (b - a) sin^2(t/2)`, which absorbs both
/// square-root edges and, for `c = 1`, the `1/sqrt(x)` blow-up at zero.
fn continuous_mass(x: f64, a: f64, b: f64, c: f64) -> f64 {
    let w = b - a;
    let u = ((x - a) / w).clamp(0.0, 1.0);
    let theta_end = 2.0 * u.sqrt().asin();
    let integrand = |t: f64| {
        let s = (0.5 * t).sin();
        let s2 = s * s;
        let xt = a + w * s2;
        let sin_t = t.sin();
        0.25 * w * w * sin_t * sin_t / (2.0 * PI * c * xt)
    };
    quadrature::integrate(integrand, 0.0, theta_end, CDF_TOL)
}

/// CDF of the companion law, `F_inf(x) = c F(x) + (1 - c) 1{x >= 0}`.
pub fn companion_mp_cdf(x: f64, c: f64) -> f64 {
    let step = if x >= 0.0 { 1.0 - c } else { 0.0 };
    (c * mp_cdf(x, c) + step).clamp(0.0, 1.0)
}

/// Maps a CDF value of the companion law at `x` to the CDF of the sample
/// covariance law at `x`: `(F_inf(x) - (1 - c) 1{x >= 0}) / c`.
pub fn companion_law_convert(f_inf: f64, c: f64, x: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
    }
    let step = if x >= 0.0 { 1.0 - c } else { 0.0 };
    let value = (f_inf - step) / c;
    if !(-1e-12..=1.0 + 1e-12).contains(&value) {
        return Err(Error::CdfOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}
