//! Generalized eigenpairs of reduced operators, mode sweeps for fundamental
//! tones, refinement/extrapolation studies and truncation probes.

pub mod lanczos;
mod probe;
mod richardson;
mod tone;
pub mod tridiag;

pub use probe::{truncation_probe, ProbeReport};
pub use richardson::{richardson, Extrapolation};
pub use tone::{
    fundamental_tone, ground_pair, mode_value, GridPolicy, ModeTone, ToneResult, ToneTarget, ZERO_EIGENVALUE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Grid, ReducedOperator, Section, SectionKind};

/// Largest unreduced block handled by bisection in automatic mode.
pub const DENSE_LIMIT: usize = 512;

/// Residual bound every reported pair must satisfy.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Multiple of `eps·‖T‖∞` below which a residual is roundoff.
pub const RESIDUAL_ROUNDOFF: f64 = 16.0;

/// [`RESIDUAL_BOUND`], raised to the roundoff floor of `t` when that is
/// larger.
pub fn residual_bound(t: &crate::operators::SymTridiagonal) -> f64 {
    RESIDUAL_BOUND.max(RESIDUAL_ROUNDOFF * f64::EPSILON * tridiag::inf_norm(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Section>,
    /// `‖Kv − λMv‖ / ‖Mv‖` per pair.
    pub residuals: Vec<f64>,
    pub solver: SolverKind,
    pub grid: Grid,
    pub mode: f64,
}

/// Lowest `count` generalized eigenpairs of `(stiffness, mass)`.
pub fn smallest_eigenpairs(op: &ReducedOperator, count: usize) -> Result<EigenResult> {
    smallest_eigenpairs_with(op, count, SolverChoice::Auto)
}

pub fn smallest_eigenpairs_with(op: &ReducedOperator, count: usize, choice: SolverChoice) -> Result<EigenResult> {
    if count == 0 || count + 2 > op.grid.intervals() + 1 {
        return Err(Error::arg(format!(
            "eigenpair count {count} must lie in 1..={}",
            (op.grid.intervals() + 1).saturating_sub(2)
        )));
    }
    if op.mass.weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Breakdown("mass matrix has a non-positive weight".into()));
    }
    let solver = match choice {
        SolverChoice::Dense => SolverKind::Dense,
        SolverChoice::Lanczos => SolverKind::Lanczos,
        SolverChoice::Auto if op.block_len() <= DENSE_LIMIT => SolverKind::Dense,
        SolverChoice::Auto => SolverKind::Lanczos,
    };
    let t = op.scaled();
    let bound = residual_bound(&t);
    let starts = tridiag::split_points(&t);
    let mut pairs: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    for (b, &s) in starts.iter().enumerate() {
        let e = starts.get(b + 1).copied().unwrap_or(t.len());
        let block = tridiag::sub_block(&t, s, e);
        let found = match solver {
            SolverKind::Dense => tridiag::smallest_by_bisection(&block, count)?,
            SolverKind::Lanczos => {
                let cfg = lanczos::LanczosConfig { seed: lanczos::START_SEED + b as u64, ..Default::default() };
                lanczos::smallest_shift_invert(&block, count, lanczos_shift(&block), &cfg)?
            }
        };
        for (lambda, y) in found {
            let mut full = vec![0.0; t.len()];
            full[s..e].copy_from_slice(&y);
            pairs.push((lambda, b, full));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    pairs.truncate(count);

    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (lambda, _, y) in pairs {
        // Back to the generalized problem, M-normalized.
        let v: Vec<f64> = y.iter().zip(&op.mass.weights).map(|(yi, w)| yi / w.sqrt()).collect();
        let kv = op.stiffness.matvec(&v);
        let mv: Vec<f64> = v.iter().zip(&op.mass.weights).map(|(a, w)| a * w).collect();
        let r: f64 = kv.iter().zip(&mv).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        let m: f64 = mv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let residual = r / m;
        if !(residual <= bound) {
            return Err(Error::Convergence { iterations: 0, residual });
        }
        eigenvalues.push(lambda);
        residuals.push(residual);
        let section = match op.section_kind() {
            SectionKind::Scalar => Section::new(SectionKind::Scalar, op.mode, op.grid, v)?,
            SectionKind::Spinor => Section::new(SectionKind::Spinor, op.mode, op.grid, v)?,
        };
        eigenvectors.push(section);
    }
    Ok(EigenResult { eigenvalues, eigenvectors, residuals, solver, grid: op.grid, mode: op.mode })
}

/// Shift just below the lowest eigenvalue, located by Sturm bisection.
fn lanczos_shift(t: &crate::operators::SymTridiagonal) -> f64 {
    let low = tridiag::bisect_eigenvalue(t, 0);
    low - 1e-2 * low.abs() - 100.0 * f64::EPSILON * tridiag::inf_norm(t).max(1.0)
}

/// Number of generalized eigenvalues strictly below `threshold`.
pub fn count_below(op: &ReducedOperator, threshold: f64) -> usize {
    tridiag::sturm_count(&op.scaled(), threshold)
}
