//! Dense real polynomials and real-root isolation.
//!
//! Two independent root finders live here: [`Poly::real_roots`] brackets
//! sign changes between the critical points of the polynomial (obtained
//! recursively from its derivatives) and refines by bisection;
//! [`Poly::companion_roots`] takes the eigenvalues of the companion matrix.

use std::ops::{Add, Mul};

use nalgebra::{Complex, DMatrix};

/// Polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect())
    }

    /// Bound on the modulus of every root.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading().abs();
        1.0 + self.coeffs[..self.degree()].iter().map(|c| c.abs() / lead).fold(0.0, f64::max)
    }

    /// All real roots, ascending, each refined by bisection until the
    /// bracket is below `rel_tol` relative to the root.
    ///
    /// `breaks` are extra points that are added to the partition (for
    /// instance poles of a rational function sharing this numerator).
    pub fn real_roots(&self, breaks: &[f64], rel_tol: f64) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let bound = self.cauchy_bound();
        let mut extra: Vec<f64> = breaks.iter().copied().filter(|b| b.abs() < bound).collect();
        extra.sort_by(f64::total_cmp);
        roots_in(self, -bound, bound, &extra, rel_tol)
    }

    /// Roots as eigenvalues of the companion matrix, unordered.
    pub fn companion_roots(&self) -> Vec<Complex<f64>> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            m[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// Newton iterations from `x0`, stopping when the step stalls.
    pub fn polish(&self, x0: f64, iterations: usize) -> f64 {
        let dp = self.derivative();
        let mut x = x0;
        for _ in 0..iterations {
            let d = dp.eval(x);
            if d == 0.0 {
                break;
            }
            let step = self.eval(x) / d;
            let next = x - step;
            if !next.is_finite() || (self.eval(next).abs() >= self.eval(x).abs() && step != 0.0) {
                break;
            }
            x = next;
        }
        x
    }
}

/// Recursive isolation: between consecutive real roots of the derivative the
/// polynomial is monotone, so each piece holds at most one sign change.
fn roots_in(p: &Poly, lo: f64, hi: f64, breaks: &[f64], rel_tol: f64) -> Vec<f64> {
    match p.degree() {
        0 => return Vec::new(),
        1 => {
            let r = -p.coeffs[0] / p.coeffs[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let critical = roots_in(&p.derivative(), lo, hi, &[], rel_tol);
    let mut points = Vec::with_capacity(critical.len() + breaks.len() + 2);
    points.push(lo);
    points.extend(critical);
    points.extend_from_slice(breaks);
    points.push(hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut roots: Vec<f64> = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa == 0.0 {
            if roots.last() != Some(&a) {
                roots.push(a);
            }
            continue;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        roots.push(bisect(p, a, b, fa, rel_tol));
    }
    if p.eval(hi) == 0.0 && roots.last() != Some(&hi) {
        roots.push(hi);
    }
    roots
}

fn bisect(p: &Poly, mut a: f64, mut b: f64, mut fa: f64, rel_tol: f64) -> f64 {
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= rel_tol * mid.abs() {
            return mid;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        Poly::new((0..n).map(|i| get(&self.coeffs, i) + get(&rhs.coeffs, i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
