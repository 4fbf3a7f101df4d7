use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::richardson::{richardson, Extrapolation};
use super::{smallest_eigenpairs_with, EigenResult, SolverChoice, SolverKind};
use crate::error::{Error, Result};
use crate::geometry::{EndKind, WarpedSurface};
use crate::operators::{assemble_dirac_square, assemble_laplacian, BoundaryCondition, Grid, ReducedOperator};
use crate::spin_fourier::{dirac_mode_lower_bound, enumerate_modes, mode_lower_bound_term, FieldKind};

/// Eigenvalues at or below this count as zero when the first nonzero
/// eigenvalue is requested.
pub const ZERO_EIGENVALUE: f64 = 1e-6;

/// Hard cap on the number of nonnegative frequencies a sweep may visit.
const MAX_SWEEP_MODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToneTarget {
    Lowest,
    FirstNonzero,
}

/// How windows and refinement levels are chosen for a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    /// Intervals on the coarsest level; levels use `N, 2N, 4N`.
    pub intervals: usize,
    /// Coarsest distance `δ` from a cone-point end; levels use `δ, δ/2, δ/4`.
    pub pole_offset: f64,
    /// Distance past the finite core at which infinite ends are cut.
    pub far_field: f64,
    pub levels: usize,
    /// Initial number of nonnegative frequencies swept.
    pub mode_cutoff: usize,
    pub solver: SolverChoice,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            intervals: 512,
            pole_offset: 1e-2,
            far_field: 30.0,
            levels: 3,
            mode_cutoff: 8,
            solver: SolverChoice::Auto,
        }
    }
}

impl GridPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.intervals + 1 < crate::operators::MIN_NODES {
            return Err(Error::arg(format!("grid needs at least {} nodes", crate::operators::MIN_NODES)));
        }
        if !(self.pole_offset > 0.0 && self.far_field > 0.0) {
            return Err(Error::arg("pole offset and far field must be positive"));
        }
        if self.levels == 0 || self.mode_cutoff == 0 {
            return Err(Error::arg("levels and mode cutoff must be at least 1"));
        }
        Ok(())
    }

    /// Window for `surface` with cone-point ends cut at distance `delta`.
    ///
    /// Regular boundary circles and far-field cuts are Dirichlet. Cone-point
    /// ends get a natural condition at the cut, which converges to the
    /// Friedrichs extension as `delta → 0`.
    pub fn window(&self, surface: &WarpedSurface, intervals: usize, delta: f64) -> Result<Grid> {
        let breaks = surface.warp.breakpoints();
        let core_lo = breaks.first().copied().unwrap_or(0.0);
        let core_hi = breaks.last().copied().unwrap_or(0.0);
        let mut ends = [(0.0, BoundaryCondition::Dirichlet); 2];
        for (i, upper) in [false, true].into_iter().enumerate() {
            let t = if upper { surface.t_max } else { surface.t_min };
            let sign = if upper { -1.0 } else { 1.0 };
            ends[i] = match surface.end_kind(upper) {
                EndKind::Boundary => (t, BoundaryCondition::Dirichlet),
                EndKind::ConePoint { .. } => (t + sign * delta, BoundaryCondition::Natural),
                EndKind::Infinite if upper => (core_hi + self.far_field, BoundaryCondition::Dirichlet),
                EndKind::Infinite => (core_lo - self.far_field, BoundaryCondition::Dirichlet),
            };
        }
        Ok(Grid::new(ends[0].0, ends[1].0, intervals)?.with_bc(ends[0].1, ends[1].1))
    }

    fn has_cone_end(surface: &WarpedSurface) -> bool {
        surface.ends().iter().any(|e| matches!(e, EndKind::ConePoint { .. }))
    }
}

/// Extrapolated ground value of one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTone {
    pub mode: f64,
    /// Values at `N, 2N, 4N` intervals with the smallest `δ`.
    pub h_levels: Extrapolation,
    /// Values at `δ, δ/2, δ/4` on the finest grid; empty without cone ends.
    pub delta_levels: Option<Extrapolation>,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneResult {
    pub lambda_star: f64,
    /// Attaining frequency; smallest `|ν|` among modes within the error bar.
    pub mode: f64,
    pub per_mode: Vec<ModeTone>,
    pub h_sequence: Vec<f64>,
    pub delta_sequence: Vec<f64>,
    pub error: f64,
    /// Every unswept mode is provably above `lambda_star`. When false,
    /// `lambda_star` is only an upper estimate.
    pub certified: bool,
    pub solver: SolverKind,
    pub field: FieldKind,
    pub target: ToneTarget,
}

fn assemble(surface: &WarpedSurface, field: FieldKind, nu: f64, grid: &Grid) -> Result<ReducedOperator> {
    match field {
        FieldKind::Scalar => assemble_laplacian(surface, nu, grid),
        FieldKind::Spinor(spin) => assemble_dirac_square(surface, spin, nu, grid),
    }
}

/// Lowest eigenpair of one frequency on one grid.
pub fn ground_pair(surface: &WarpedSurface, field: FieldKind, nu: f64, grid: &Grid) -> Result<EigenResult> {
    smallest_eigenpairs_with(&assemble(surface, field, nu, grid)?, 1, SolverChoice::Auto)
}

/// Target eigenvalue of one frequency on one grid.
pub fn mode_value(
    surface: &WarpedSurface,
    field: FieldKind,
    nu: f64,
    grid: &Grid,
    target: ToneTarget,
    solver: SolverChoice,
) -> Result<(f64, SolverKind)> {
    let op = assemble(surface, field, nu, grid)?;
    let count = if target == ToneTarget::FirstNonzero && nu == 0.0 { 3 } else { 1 };
    let r = smallest_eigenpairs_with(&op, count, solver)?;
    let value = match target {
        ToneTarget::Lowest => r.eigenvalues.first().copied(),
        ToneTarget::FirstNonzero => r.eigenvalues.iter().copied().find(|&l| l > ZERO_EIGENVALUE),
    };
    value
        .map(|v| (v, r.solver))
        .ok_or_else(|| Error::Breakdown(format!("no nonzero eigenvalue among the lowest {count} of mode {nu}")))
}

fn pruning_bound(surface: &WarpedSurface, field: FieldKind, nu: f64, grid: &Grid) -> f64 {
    match field {
        FieldKind::Scalar => mode_lower_bound_term(nu, &surface.warp, grid),
        FieldKind::Spinor(_) => dirac_mode_lower_bound(nu, &surface.warp, grid),
    }
}

fn sweep_mode(
    surface: &WarpedSurface,
    field: FieldKind,
    nu: f64,
    policy: &GridPolicy,
    target: ToneTarget,
) -> Result<(ModeTone, SolverKind)> {
    let cone = GridPolicy::has_cone_end(surface);
    let levels = policy.levels;
    let scale = |i: usize| 1usize << i;
    let finest_delta = if cone { policy.pole_offset / scale(levels - 1) as f64 } else { policy.pole_offset };
    let mut solver = SolverKind::Dense;
    let mut h_values = Vec::with_capacity(levels);
    for i in 0..levels {
        let grid = policy.window(surface, policy.intervals * scale(i), finest_delta)?;
        let (v, s) = mode_value(surface, field, nu, &grid, target, policy.solver)?;
        if s == SolverKind::Lanczos {
            solver = s;
        }
        h_values.push(v);
    }
    let h_levels = richardson(&h_values, 2.0);
    let finest_n = policy.intervals * scale(levels - 1);
    let delta_levels = if cone && levels > 1 {
        let mut values = Vec::with_capacity(levels);
        for j in 0..levels - 1 {
            let grid = policy.window(surface, finest_n, policy.pole_offset / scale(j) as f64)?;
            values.push(mode_value(surface, field, nu, &grid, target, policy.solver)?.0);
        }
        values.push(*h_values.last().unwrap());
        Some(richardson(&values, 2.0))
    } else {
        None
    };
    let finest = *h_values.last().unwrap();
    let mut value = h_levels.value;
    let mut error = h_levels.last_difference;
    if let Some(d) = &delta_levels {
        value += d.value - finest;
        error += d.last_difference;
    }
    Ok((ModeTone { mode: nu, h_levels, delta_levels, value, error }, solver))
}

/// Minimum over frequencies of the extrapolated target eigenvalue.
///
/// Frequencies are swept in order of `|ν|` (only `ν ≥ 0`, since `±ν`
/// spectra coincide), starting with `policy.mode_cutoff` of them and
/// doubling while the pruning term of the next unswept frequency is still
/// below the current minimum.
pub fn fundamental_tone(
    surface: &WarpedSurface,
    field: FieldKind,
    target: ToneTarget,
    policy: &GridPolicy,
) -> Result<ToneResult> {
    policy.validate()?;
    let cone = GridPolicy::has_cone_end(surface);
    let finest_delta = policy.pole_offset / (1usize << (policy.levels - 1)) as f64;
    let probe_grid = policy.window(surface, policy.intervals, finest_delta)?;

    let mut cutoff = policy.mode_cutoff;
    let mut done: Vec<(ModeTone, SolverKind)> = Vec::new();
    let certified = loop {
        let modes: Vec<f64> = enumerate_modes(field, surface.period, cutoff + 1)?.nonnegative().collect();
        let (todo, next) = modes.split_at(modes.len() - 1);
        let fresh: Vec<f64> = todo.iter().copied().filter(|nu| !done.iter().any(|(m, _)| m.mode == *nu)).collect();
        let results: Vec<Result<(ModeTone, SolverKind)>> =
            fresh.par_iter().map(|&nu| sweep_mode(surface, field, nu, policy, target)).collect();
        for r in results {
            done.push(r?);
        }
        let best = done.iter().map(|(m, _)| m.value).fold(f64::INFINITY, f64::min);
        if pruning_bound(surface, field, next[0], &probe_grid) >= best {
            break true;
        }
        if cutoff >= MAX_SWEEP_MODES {
            log::warn!("mode sweep exhausted at {cutoff} modes without a pruning certificate");
            break false;
        }
        cutoff *= 2;
    };
    done.sort_by(|a, b| a.0.mode.partial_cmp(&b.0.mode).unwrap());

    let best = done
        .iter()
        .map(|(m, _)| m)
        .min_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
        .cloned()
        .ok_or_else(|| Error::arg("empty mode sweep"))?;
    let attaining =
        done.iter().map(|(m, _)| m).find(|m| m.value <= best.value + best.error).cloned().unwrap_or(best.clone());

    let h_sequence = (0..policy.levels)
        .map(|i| policy.window(surface, policy.intervals << i, finest_delta).map(|g| g.h()))
        .collect::<Result<Vec<f64>>>()?;
    let delta_sequence =
        if cone { (0..policy.levels).map(|j| policy.pole_offset / (1usize << j) as f64).collect() } else { Vec::new() };
    let solver =
        if done.iter().any(|(_, s)| *s == SolverKind::Lanczos) { SolverKind::Lanczos } else { SolverKind::Dense };
    Ok(ToneResult {
        lambda_star: best.value,
        mode: attaining.mode,
        error: best.error,
        per_mode: done.into_iter().map(|(m, _)| m).collect(),
        h_sequence,
        delta_sequence,
        certified,
        solver,
        field,
        target,
    })
}
