//! Symmetric tridiagonal kernels: Sturm counts, bisection, pivoted LU
//! solves and inverse iteration.

use crate::error::{Error, Result};
use crate::operators::SymTridiagonal;

/// Number of eigenvalues of `t` strictly below `x` (LDLᵀ inertia).
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let n = t.len();
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..n {
        let b2 = if i > 0 { t.off[i - 1] * t.off[i - 1] } else { 0.0 };
        d = t.diag[i] - x - if i > 0 { b2 / d } else { 0.0 };
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the spectrum.
pub fn gershgorin(t: &SymTridiagonal) -> (f64, f64) {
    let n = t.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += t.off[i - 1].abs();
        }
        if i + 1 < n {
            r += t.off[i].abs();
        }
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    (lo, hi)
}

pub fn inf_norm(t: &SymTridiagonal) -> f64 {
    let (lo, hi) = gershgorin(t);
    lo.abs().max(hi.abs())
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on Sturm counts.
pub fn bisect_eigenvalue(t: &SymTridiagonal, k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(t);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= 1e-14 * scale + f64::MIN_POSITIVE;
    hi += 1e-14 * scale + f64::MIN_POSITIVE;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factorization of `t − σI` with partial pivoting (LAPACK `gttrf`
/// layout: `u2` is the second superdiagonal created by row swaps).
pub struct ShiftedLu {
    l: Vec<f64>,
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    pub fn new(t: &SymTridiagonal, sigma: f64) -> Result<Self> {
        let n = t.len();
        if n == 0 {
            return Err(Error::Breakdown("empty matrix".into()));
        }
        let mut d: Vec<f64> = t.diag.iter().map(|a| a - sigma).collect();
        let mut dl = t.off.clone();
        let mut u1 = t.off.clone();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swap = vec![false; n.saturating_sub(1)];
        let scale = inf_norm(t).max(sigma.abs()).max(f64::MIN_POSITIVE);
        let floor = f64::EPSILON * scale;
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                let f = dl[i] / d[i];
                l[i] = f;
                d[i + 1] -= f * u1[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                l[i] = f;
                let tmp = u1[i];
                u1[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] *= -f;
                }
                swap[i] = true;
            }
            dl[i] = 0.0;
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Breakdown("non-finite pivot in shifted factorization".into()));
        }
        Ok(ShiftedLu { l, d, u1, u2, swap })
    }

    /// Solves `(t − σI) x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.l[i] * b[i];
            } else {
                b[i + 1] -= self.l[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.u1[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u1[i] * b[i + 1] - self.u2[i] * b[i + 2]) / self.d[i];
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// `‖t x − λ x‖` for unit `x`.
pub fn residual(t: &SymTridiagonal, lambda: f64, x: &[f64]) -> f64 {
    t.matvec(x).iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt()
}

/// Eigenvector for an accurately known eigenvalue, orthogonalized against
/// `previous` (vectors of nearby eigenvalues of the same matrix).
pub fn inverse_iteration(t: &SymTridiagonal, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = t.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let scale = inf_norm(t).max(f64::MIN_POSITIVE);
    let lu = ShiftedLu::new(t, lambda + 4.0 * f64::EPSILON * scale)?;
    // Deterministic start with components in every eigendirection.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i as f64) * 0.618_033_988_75).fract()).collect();
    normalize(&mut x);
    for _ in 0..4 {
        lu.solve(&mut x);
        for p in previous {
            let c = dot(&x, p);
            x.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        if normalize(&mut x) == 0.0 || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Breakdown("inverse iteration collapsed".into()));
        }
    }
    Ok(x)
}

/// Rayleigh-quotient iteration from a nearly converged unit vector, kept
/// orthogonal to `previous`.
///
/// Bisection and Ritz values resolve `λ` only to about `eps·‖T‖`, which on
/// badly scaled operators leaves the plain inverse-iteration vector short
/// of the residual bound.
pub fn refine(t: &SymTridiagonal, mut x: Vec<f64>, previous: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let scale = inf_norm(t).max(f64::MIN_POSITIVE);
    let mut lambda = dot(&t.matvec(&x), &x);
    for _ in 0..REFINE_STEPS {
        if residual(t, lambda, &x) <= REFINE_TOLERANCE * lambda.abs().max(1.0) {
            break;
        }
        let lu = ShiftedLu::new(t, lambda + 4.0 * f64::EPSILON * lambda.abs().max(f64::MIN_POSITIVE))?;
        lu.solve(&mut x);
        for p in previous {
            let c = dot(&x, p);
            x.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        if normalize(&mut x) == 0.0 || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Breakdown(format!("refinement collapsed (‖T‖ = {scale:e})")));
        }
        lambda = dot(&t.matvec(&x), &x);
    }
    Ok((lambda, x))
}

const REFINE_STEPS: usize = 4;
const REFINE_TOLERANCE: f64 = 1e-13;

/// The `count` smallest eigenpairs of an unreduced tridiagonal by bisection
/// and inverse iteration.
pub fn smallest_by_bisection(t: &SymTridiagonal, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let count = count.min(t.len());
    let scale = inf_norm(t).max(f64::MIN_POSITIVE);
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = bisect_eigenvalue(t, k);
        let cluster: Vec<Vec<f64>> =
            out.iter().filter(|(mu, _)| (lambda - mu).abs() < 1e-6 * scale).map(|(_, v)| v.clone()).collect();
        let v = inverse_iteration(t, lambda, &cluster)?;
        out.push(refine(t, v, &cluster)?);
    }
    Ok(out)
}

/// Splits `t` at exactly-zero couplings into unreduced diagonal blocks;
/// returns the start index of each block.
pub fn split_points(t: &SymTridiagonal) -> Vec<usize> {
    let mut starts = vec![0];
    for (i, o) in t.off.iter().enumerate() {
        if *o == 0.0 {
            starts.push(i + 1);
        }
    }
    starts
}

pub fn sub_block(t: &SymTridiagonal, start: usize, end: usize) -> SymTridiagonal {
    SymTridiagonal { diag: t.diag[start..end].to_vec(), off: t.off[start..end.saturating_sub(1).max(start)].to_vec() }
}
