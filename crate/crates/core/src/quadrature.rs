//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and half-infinite
//! intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_PANELS: usize = 2000;

/// One 15-point Kronrod panel; returns (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = r * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Integrates `f` over the finite interval `[a, b]` to absolute tolerance
/// `tol`, bisecting the panel with the largest error estimate until the
/// total estimate meets `tol`, hits roundoff level, or the panel budget
/// runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol.max(50.0 * f64::EPSILON * total.abs()) || panels.len() >= MAX_PANELS {
            return total;
        }
        let (i, _) = panels.iter().enumerate().max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap()).unwrap();
        let (lo, hi, _, _) = panels.swap_remove(i);
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            return total;
        }
        let (l, el) = gk15(&f, lo, m);
        let (r, er) = gk15(&f, m, hi);
        panels.push((lo, m, l, el));
        panels.push((m, hi, r, er));
    }
}

/// Integrates over `[a, ∞)` by summing doubling chunks until the tail
/// contribution drops below `rel_tol` of the running total.
///
/// Returns [`Error::InfiniteArea`] when the chunk contributions stop
/// shrinking, which is the divergence signature for nonnegative integrands.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<f64> {
    let mut total = 0.0_f64;
    let mut lo = a;
    let mut width = 1.0;
    let mut prev_chunk = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..64 {
        let hi = lo + width;
        let chunk = integrate(&f, lo, hi, rel_tol * total.abs().max(1e-300).max(rel_tol));
        total += chunk;
        if chunk.abs() <= rel_tol * total.abs() {
            return Ok(total);
        }
        if chunk.abs() >= 0.9 * prev_chunk.abs() {
            stalled += 1;
            if stalled >= 3 {
                return Err(Error::InfiniteArea);
            }
        } else {
            stalled = 0;
        }
        prev_chunk = chunk;
        lo = hi;
        width *= 2.0;
    }
    Err(Error::InfiniteArea)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-14);
        assert!((v - (64.0 - 1.0) / 6.0 + 9.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_cubed() {
        let v = integrate(|t: f64| t.cos().powi(3), -PI / 2.0, PI / 2.0, 1e-14);
        assert!((v - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate_to_infinity(|t: f64| (-t).exp(), 0.0, 1e-14).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_tail() {
        assert!(matches!(integrate_to_infinity(|_| 1.0, 0.0, 1e-12), Err(Error::InfiniteArea)));
    }
}
