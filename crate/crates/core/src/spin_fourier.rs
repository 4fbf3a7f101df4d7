//! Spin structures on the circle factor and the Fourier frequencies they
//! allow.
//!
//! With the spinor bundle trivialized along `(∂_t, f⁻¹∂_φ)`, the bounding
//! structure makes spinors antiperiodic around the circle (half-integer
//! frequencies in units of `2π/P`); the non-bounding one makes them periodic
//! and admits the `ν = 0` mode that carries parallel spinors on flat
//! cylinders.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WarpFn;
use crate::operators::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinStructure {
    Bounding,
    NonBounding,
}

impl SpinStructure {
    pub fn name(&self) -> &'static str {
        match self {
            SpinStructure::Bounding => "bounding",
            SpinStructure::NonBounding => "non-bounding",
        }
    }

    /// Offset of the frequency lattice in units of `2π/P`.
    fn offset(&self) -> f64 {
        match self {
            SpinStructure::Bounding => 0.5,
            SpinStructure::NonBounding => 0.0,
        }
    }

    /// Whether `nu` lies on this structure's frequency lattice.
    pub fn admits(&self, nu: f64, period: f64) -> bool {
        let x = nu * period / TAU - self.offset();
        (x - x.round()).abs() < 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "field", content = "spin")]
pub enum FieldKind {
    Scalar,
    Spinor(SpinStructure),
}

impl FieldKind {
    fn offset(&self) -> f64 {
        match self {
            FieldKind::Scalar => 0.0,
            FieldKind::Spinor(s) => s.offset(),
        }
    }
}

/// Lowest-`|ν|` frequencies of one field kind, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub frequencies: Vec<f64>,
    pub field_kind: FieldKind,
    pub cutoff: usize,
}

impl ModeSet {
    pub fn contains(&self, nu: f64) -> bool {
        self.frequencies.contains(&nu)
    }

    /// Frequencies with `ν ≥ 0`; spectra for `±ν` coincide, so sweeps only
    /// need this half.
    pub fn nonnegative(&self) -> impl Iterator<Item = f64> + '_ {
        self.frequencies.iter().copied().filter(|&f| f >= 0.0)
    }
}

/// The `2·cutoff` (plus one when `0` belongs to the lattice) lowest-`|ν|`
/// frequencies for `field` on a circle of period `period`.
pub fn enumerate_modes(field: FieldKind, period: f64, cutoff: usize) -> Result<ModeSet> {
    if cutoff == 0 {
        return Err(Error::arg("mode cutoff must be at least 1"));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::arg(format!("circle period must be positive, got {period}")));
    }
    let unit = TAU / period;
    let offset = field.offset();
    let mut frequencies: Vec<f64> = Vec::with_capacity(2 * cutoff + 1);
    let c = cutoff as i64;
    if offset == 0.0 {
        for m in -c..=c {
            frequencies.push(m as f64 * unit);
        }
    } else {
        for m in 0..c {
            let v = (m as f64 + offset) * unit;
            frequencies.push(v);
            frequencies.push(-v);
        }
    }
    frequencies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ModeSet { frequencies, field_kind: field, cutoff })
}

/// `min_grid ν²/f²`: the Laplacian in mode `ν` has no spectrum below this.
pub fn mode_lower_bound_term(nu: f64, warp: &WarpFn, grid: &Grid) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    grid.nodes()
        .map(|t| {
            let f = warp.value(t);
            nu * nu / (f * f)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Pruning term for `D²` in mode `ν`: `min (|ν| − |f'|/2)₊²/f² + min scal/4`.
///
/// Obtained from the Bochner split of each block with the connection
/// energy bounded below by its potential part.
pub fn dirac_mode_lower_bound(nu: f64, warp: &WarpFn, grid: &Grid) -> f64 {
    let mut potential = f64::INFINITY;
    let mut curvature = f64::INFINITY;
    for t in grid.nodes() {
        let (f, df, d2) = warp.eval(t);
        let gap = (nu.abs() - 0.5 * df.abs()).max(0.0);
        potential = potential.min(gap * gap / (f * f));
        curvature = curvature.min(-d2 / (2.0 * f));
    }
    potential + curvature
}
