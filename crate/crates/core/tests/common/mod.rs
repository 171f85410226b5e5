//! Reference computations written independently of the library code.

#![allow(dead_code)]

use rand::Rng;
use spiked_core::{SpikeSpec, SpikedModel};

pub fn model(spikes: &[(f64, usize)], p: usize, n: usize) -> SpikedModel {
    SpikedModel::new(spikes.iter().map(|&(a, k)| SpikeSpec::new(a, k)), p, n).unwrap()
}

/// Spikes 4, 3 and 0.1 with `n = 2p`.
pub fn half_model(p: usize) -> SpikedModel {
    model(&[(4.0, 1), (3.0, 1), (0.1, 1)], p, 2 * p)
}

/// `d z_p / dm` evaluated term by term.
pub fn z_prime_direct(model: &SpikedModel, m: f64) -> f64 {
    let n = model.n() as f64;
    let c = model.p() as f64 / n;
    let mut r = 0.0;
    let mut spikes = 0.0;
    for s in model.spikes() {
        let k = s.multiplicity as f64;
        r += k;
        spikes += k * s.alpha * s.alpha / (1.0 + s.alpha * m).powi(2);
    }
    1.0 / (m * m) - c / (1.0 + m).powi(2) + (r / (1.0 + m).powi(2) - spikes) / n
}

/// Poles of `z_p`, ascending.
pub fn poles(model: &SpikedModel) -> Vec<f64> {
    let mut v = vec![0.0, -1.0];
    v.extend(model.spikes().iter().map(|s| -1.0 / s.alpha));
    v.sort_by(f64::total_cmp);
    v
}

/// Real zeros of `z_p'` found by scanning `points` grid points for sign
/// changes. The grid is split between consecutive poles and clustered at
/// each pole (cosine spacing), where the spike roots sit.
pub fn sign_scan_roots(model: &SpikedModel, points: usize) -> Vec<f64> {
    let c = model.p() as f64 / model.n() as f64;
    let ps = poles(model);
    let reach = [1.0 / (1.0 - c.sqrt()).abs(), 1.0 / (1.0 + c.sqrt()), -ps[0], 1.0]
        .into_iter()
        .fold(0.0, f64::max)
        * 8.0;
    let mut breaks = vec![-reach];
    breaks.extend(&ps);
    breaks.push(reach);
    let per_piece = points / (breaks.len() - 1);
    let f = |m: f64| z_prime_direct(model, m);
    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let grid: Vec<f64> = (1..per_piece)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / per_piece as f64;
                lo + (hi - lo) * 0.5 * (1.0 - t.cos())
            })
            .collect();
        for g in grid.windows(2) {
            let (fa, fb) = (f(g[0]), f(g[1]));
            if fa == 0.0 {
                roots.push(g[0]);
            } else if fa.signum() != fb.signum() && fb != 0.0 {
                roots.push(bisect(f, g[0], g[1]));
            }
        }
    }
    roots
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_sign = f(a).signum();
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        if f(mid).signum() == fa_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// Real critical points expected from the spike classification: two near
/// the bulk edges plus two per spike that leaves the bulk.
pub fn expected_real_roots(model: &SpikedModel) -> usize {
    let c = model.c_p();
    let separated = model
        .spikes()
        .iter()
        .filter(|s| s.alpha > 1.0 + c.sqrt() || (c < 1.0 && s.alpha < 1.0 - c.sqrt()))
        .count();
    2 + 2 * separated
}

/// Random spiked model with up to three well separated spikes that stay
/// away from every threshold.
pub fn random_model(rng: &mut impl Rng) -> SpikedModel {
    let c = loop {
        let c: f64 = rng.random_range(0.1..5.0);
        if !(0.99..=1.01).contains(&c) {
            break c;
        }
    };
    let n = 10f64.powf(rng.random_range(3.0..5.0)).round() as usize;
    let p = ((c * n as f64).round() as usize).max(4);
    let count = rng.random_range(1..=3);
    let mut alphas: Vec<f64> = Vec::new();
    while alphas.len() < count {
        let a = 10f64.powf(rng.random_range(-1.3..1.3));
        let far = |t: f64| (a - t).abs() > 0.1 * t.max(0.1);
        let thresholds = [1.0, 1.0 + c.sqrt(), (1.0 - c.sqrt()).abs()];
        if thresholds.iter().all(|&t| far(t)) && alphas.iter().all(|&b| far(b)) {
            alphas.push(a);
        }
    }
    let spikes: Vec<SpikeSpec> =
        alphas.iter().map(|&a| SpikeSpec::new(a, rng.random_range(1..=3))).collect();
    SpikedModel::new(spikes, p, n).unwrap()
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`; tolerant of
/// integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let term = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        // distance to the nearer endpoint, 1 - tanh|u| without cancellation
        let d = half / (u.abs().exp() * u.cosh());
        let x = if t < 0.0 { a + d } else { b - d };
        if d == 0.0 || x <= a || x >= b {
            0.0
        } else {
            half * w * f(x)
        }
    };
    let mut h = 0.5;
    let tmax = 4.0;
    let mut sum = term(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        sum += term(k as f64 * h) + term(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            sum += term(k as f64 * h) + term(-(k as f64) * h);
            k += 2;
        }
        let next = sum * h;
        if (next - estimate).abs() < 1e-14 * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}
