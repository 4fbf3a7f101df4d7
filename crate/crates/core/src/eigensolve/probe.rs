use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::count_below;
use crate::error::{Error, Result};
use crate::geometry::WarpedSurface;
use crate::operators::{assemble_dirac_square, assemble_laplacian, Grid};
use crate::spin_fourier::{dirac_mode_lower_bound, enumerate_modes, mode_lower_bound_term, FieldKind};

const MAX_PROBE_MODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub threshold: f64,
    pub windows: Vec<[f64; 2]>,
    /// Eigenvalues below `threshold` per window, `±ν` counted separately.
    pub counts: Vec<usize>,
    /// All windows report the same count.
    pub stable: bool,
}

fn count_window(surface: &WarpedSurface, field: FieldKind, grid: &Grid, threshold: f64) -> Result<usize> {
    let modes = enumerate_modes(field, surface.period, MAX_PROBE_MODES)?;
    let mut total = 0;
    for nu in modes.nonnegative() {
        let bound = match field {
            FieldKind::Scalar => mode_lower_bound_term(nu, &surface.warp, grid),
            FieldKind::Spinor(_) => dirac_mode_lower_bound(nu, &surface.warp, grid),
        };
        if bound >= threshold {
            return Ok(total);
        }
        let op = match field {
            FieldKind::Scalar => assemble_laplacian(surface, nu, grid)?,
            FieldKind::Spinor(spin) => assemble_dirac_square(surface, spin, nu, grid)?,
        };
        let c = count_below(&op, threshold);
        total += if nu == 0.0 { c } else { 2 * c };
    }
    Err(Error::arg(format!("threshold {threshold} needs more than {MAX_PROBE_MODES} frequencies")))
}

/// Counts eigenvalues below `threshold` on each of a nested sequence of
/// windows. A count that stays fixed as the windows exhaust the surface
/// indicates discrete spectrum below the threshold.
pub fn truncation_probe(
    surface: &WarpedSurface,
    field: FieldKind,
    windows: &[Grid],
    threshold: f64,
) -> Result<ProbeReport> {
    if windows.len() < 2 {
        return Err(Error::arg("a truncation probe needs at least two windows"));
    }
    for w in windows.windows(2) {
        if !(w[1].start() <= w[0].start() && w[1].end() >= w[0].end()) {
            return Err(Error::arg(format!(
                "windows are not nested: [{}, {}] is not inside [{}, {}]",
                w[0].start(),
                w[0].end(),
                w[1].start(),
                w[1].end()
            )));
        }
    }
    let counts =
        windows.par_iter().map(|g| count_window(surface, field, g, threshold)).collect::<Result<Vec<usize>>>()?;
    Ok(ProbeReport {
        threshold,
        windows: windows.iter().map(|g| [g.start(), g.end()]).collect(),
        stable: counts.windows(2).all(|c| c[0] == c[1]),
        counts,
    })
}
