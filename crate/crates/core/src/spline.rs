//! Natural cubic spline used by tabulated warp functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSamples {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
}

/// Interpolant with natural end conditions (zero second derivative at both
/// sample ends). Second derivatives at the knots are solved once on
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplineSamples", into = "SplineSamples")]
pub struct NaturalSpline {
    t: Vec<f64>,
    f: Vec<f64>,
    m: Vec<f64>,
}

impl TryFrom<SplineSamples> for NaturalSpline {
    type Error = Error;

    fn try_from(s: SplineSamples) -> Result<Self> {
        NaturalSpline::new(s.t, s.f)
    }
}

impl From<NaturalSpline> for SplineSamples {
    fn from(s: NaturalSpline) -> Self {
        SplineSamples { t: s.t, f: s.f }
    }
}

impl NaturalSpline {
    pub fn new(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 3 || f.len() != n {
            return Err(Error::arg("spline needs at least 3 samples with matching lengths"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::arg("spline knots must be strictly increasing"));
        }
        if f.iter().chain(t.iter()).any(|v| !v.is_finite()) {
            return Err(Error::arg("spline samples must be finite"));
        }
        // Tridiagonal system for interior second derivatives.
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = t[i] - t[i - 1];
            let h1 = t[i + 1] - t[i];
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0);
        }
        // Forward sweep (sub-diagonal entry of row i is h_{i-1}).
        for i in 2..n - 1 {
            let w = (t[i] - t[i - 1]) / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let next = if i + 1 < n - 1 { sup[i] * m[i + 1] } else { 0.0 };
            m[i] = (rhs[i] - next) / diag[i];
        }
        Ok(NaturalSpline { t, f, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.t.len();
        match self.t.binary_search_by(|k| k.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value, first and second derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (f0, f1) = (self.f[i], self.f[i + 1]);
        let value = a * f0 + b * f1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (f1 - f0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (value, d1, d2)
    }

    /// Exact integral of the interpolant over `[lo, hi]` (clamped to the knot range).
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let (r0, r1) = self.range();
        let (lo, hi) = (lo.max(r0), hi.min(r1));
        if hi <= lo {
            return 0.0;
        }
        // Piecewise cubic: Simpson is exact per segment.
        let mut total = 0.0;
        let mut edges: Vec<f64> = vec![lo];
        edges.extend(self.t.iter().copied().filter(|&k| k > lo && k < hi));
        edges.push(hi);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            total += (b - a) / 6.0 * (self.eval(a).0 + 4.0 * self.eval(mid).0 + self.eval(b).0);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let t: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let f: Vec<f64> = t.iter().map(|x| 2.0 * x + 1.0).collect();
        let s = NaturalSpline::new(t, f).unwrap();
        let (v, d1, d2) = s.eval(1.3);
        assert!((v - 3.6).abs() < 1e-14);
        assert!((d1 - 2.0).abs() < 1e-13);
        assert!(d2.abs() < 1e-13);
    }

    #[test]
    fn interpolates_sine_to_fourth_order() {
        let n = 200;
        let t: Vec<f64> = (0..=n).map(|i| i as f64 * std::f64::consts::PI / n as f64).collect();
        let f: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let s = NaturalSpline::new(t, f).unwrap();
        // sin'' vanishes at 0 and π, so natural end conditions are exact.
        for &x in &[0.3, 1.1, 2.9] {
            let (v, d1, d2) = s.eval(x);
            assert!((v - x.sin()).abs() < 1e-8);
            assert!((d1 - x.cos()).abs() < 1e-5);
            assert!((d2 + x.sin()).abs() < 1e-3);
        }
        assert!((s.integral(0.0, std::f64::consts::PI) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(NaturalSpline::new(vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
    }
}
