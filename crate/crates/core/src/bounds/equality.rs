use serde::{Deserialize, Serialize};

use super::{BoundName, BoundVerdict, Verdict};
use crate::eigensolve::{smallest_eigenpairs_with, GridPolicy, ToneResult};
use crate::error::{Error, Result};
use crate::geometry::WarpedSurface;
use crate::operators::{
    assemble_dirac_square, bochner_gradient_energy, leibniz_defect, DiscreteDirac, Grid, Section, SectionKind,
    TestFunction,
};
use crate::spin_fourier::{FieldKind, SpinStructure};

/// Both diagnostics must end below this on an equality case.
pub const KILLING_THRESHOLD: f64 = 1e-2;

/// Largest tone error bar at which an equality case is declared.
pub const EQUALITY_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingLevel {
    pub intervals: usize,
    pub pole_offset: f64,
    pub eigenvalue: f64,
    /// `(max − min)/mean` of `|φ|²` over element midpoints.
    pub norm_variation: f64,
    /// `|‖∇φ‖²/‖Dφ‖² − 1/2|`.
    pub bochner_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingDiagnostics {
    pub applicable: bool,
    pub detail: String,
    pub mode: f64,
    pub levels: Vec<KillingLevel>,
    pub decreasing: bool,
    pub below_threshold: bool,
}

impl KillingDiagnostics {
    pub fn passed(&self) -> bool {
        !self.applicable || (self.decreasing && self.below_threshold)
    }

    fn inapplicable(detail: String, mode: f64) -> Self {
        KillingDiagnostics {
            applicable: false,
            detail,
            mode,
            levels: Vec::new(),
            decreasing: false,
            below_threshold: false,
        }
    }
}

fn non_increasing(v: impl Iterator<Item = f64> + Clone) -> bool {
    let w: Vec<f64> = v.collect();
    w.windows(2).all(|p| p[1] <= p[0]) && w.first() > w.last()
}

/// Equality-case diagnostics for the spinor fundamental tone.
///
/// On each refinement level `(N·2^i, δ/2^i)` the ground pair of the
/// attaining frequency gives `u` in block `σ = ±ν`, and
/// `φ = (u, A_σu/√λ)` is the corresponding eigenspinor of `D`. An equality
/// case forces `|φ|²` constant and `‖∇φ‖² = ‖Dφ‖²/2`. Cells touching a
/// pinned node are left out of the norm variation.
pub fn killing_equality_check(
    surface: &WarpedSurface,
    spin: SpinStructure,
    tone: &ToneResult,
    friedrich: &BoundVerdict,
    policy: &GridPolicy,
) -> Result<KillingDiagnostics> {
    if tone.field != FieldKind::Spinor(spin) || friedrich.bound != BoundName::Friedrich {
        return Err(Error::arg("Killing check needs a spinor tone and its Friedrich verdict"));
    }
    let tol = super::DEFAULT_TOL_FACTOR * friedrich.error_bar + super::MARGIN_FLOOR;
    if friedrich.verdict != Verdict::Holds || friedrich.margin.abs() > tol {
        return Ok(KillingDiagnostics::inapplicable(
            format!("not an equality case: margin {:e}, verdict {}", friedrich.margin, friedrich.verdict.as_str()),
            tone.mode,
        ));
    }
    if friedrich.error_bar > EQUALITY_RESOLUTION {
        return Ok(KillingDiagnostics::inapplicable(
            format!("equality case unresolved: error bar {:e} exceeds {EQUALITY_RESOLUTION:e}", friedrich.error_bar),
            tone.mode,
        ));
    }
    let nu = tone.mode;
    let mut levels = Vec::with_capacity(policy.levels);
    for i in 0..policy.levels {
        let intervals = policy.intervals << i;
        let delta = policy.pole_offset / (1usize << i) as f64;
        let grid = policy.window(surface, intervals, delta)?;
        let op = assemble_dirac_square(surface, spin, nu, &grid)?;
        let pair = smallest_eigenpairs_with(&op, 1, policy.solver)?;
        let lambda = pair.eigenvalues[0];
        let section = &pair.eigenvectors[0];
        let n = op.block_len();
        let v = section.values();
        let mass_in = |b: usize| (b * n..(b + 1) * n).map(|i| op.mass.weights[i] * v[i] * v[i]).sum::<f64>();
        let b = if mass_in(0) >= mass_in(1) { 0 } else { 1 };
        let sigma = if b == 0 { nu } else { -nu };
        let range = grid.unknown_range();
        let mut u = vec![0.0; grid.intervals() + 1];
        for (k, j) in range.clone().enumerate() {
            u[j] = v[b * n + k];
        }
        let pinned_nodes: Vec<usize> =
            op.pinned().iter().filter(|&&p| p / n == b).map(|&p| range.start + p % n).collect();
        let h = grid.h();
        let mut density = Vec::with_capacity(grid.intervals());
        for e in 0..grid.intervals() {
            if pinned_nodes.contains(&e) || pinned_nodes.contains(&(e + 1)) {
                continue;
            }
            let (f, df, _) = surface.warp.eval(grid.midpoint(e));
            let um = 0.5 * (u[e] + u[e + 1]);
            let au = (u[e + 1] - u[e]) / h + (0.5 * df + sigma) / f * um;
            density.push(um * um + au * au / lambda);
        }
        let mean = density.iter().sum::<f64>() / density.len() as f64;
        let max = density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = density.iter().copied().fold(f64::INFINITY, f64::min);
        let block_only: Vec<f64> = v.iter().enumerate().map(|(i, x)| if i / n == b { *x } else { 0.0 }).collect();
        let phi = Section::new(SectionKind::Spinor, nu, grid, block_only)?;
        let gradient = bochner_gradient_energy(surface, &op, &phi)?;
        let dirac = op.stiffness.quadratic_form(phi.values());
        levels.push(KillingLevel {
            intervals,
            pole_offset: delta,
            eigenvalue: lambda,
            norm_variation: (max - min) / mean,
            bochner_ratio: (gradient / dirac - 0.5).abs(),
        });
    }
    let decreasing = non_increasing(levels.iter().map(|l| l.norm_variation))
        && non_increasing(levels.iter().map(|l| l.bochner_ratio));
    let last = levels.last().expect("at least one level");
    let below_threshold = last.norm_variation < KILLING_THRESHOLD && last.bochner_ratio < KILLING_THRESHOLD;
    Ok(KillingDiagnostics {
        applicable: true,
        detail: format!("equality case: margin {:e}", friedrich.margin),
        mode: nu,
        levels,
        decreasing,
        below_threshold,
    })
}

/// Cutoff `f_ρ`: `1` within `ρ` of `center`, then a smoothstep down to `0`
/// over a further `2ρ`. Returns `(f, f')`; `|f'| ≤ 3/(4ρ)`.
pub fn cutoff_function(rho: f64, center: f64) -> impl Fn(f64) -> (f64, f64) {
    move |t| {
        let d = (t - center).abs();
        let x = ((d - rho) / (2.0 * rho)).clamp(0.0, 1.0);
        let f = 1.0 - x * x * (3.0 - 2.0 * x);
        let slope = if x > 0.0 && x < 1.0 { -6.0 * x * (1.0 - x) / (2.0 * rho) } else { 0.0 };
        (f, slope * (t - center).signum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffLevel {
    pub rho: f64,
    /// `‖D(f_ρφ) − Dφ‖`.
    pub defect: f64,
    /// `‖φ‖/ρ + ‖(f_ρ − 1)Dφ‖ + ‖D(f_ρφ) − grad f_ρ·φ − f_ρDφ‖`.
    pub allowance: f64,
    /// Largest forward-difference slope of the sampled cutoff.
    pub max_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub center: f64,
    pub levels: Vec<CutoffLevel>,
    pub within_allowance: bool,
    pub decreasing: bool,
    pub slope_audit: bool,
}

impl CutoffReport {
    pub fn passed(&self) -> bool {
        self.within_allowance && self.decreasing && self.slope_audit
    }
}

/// Checks that multiplying `φ` by growing cutoffs converges to `φ` in the
/// graph norm of the discrete Dirac operator.
pub fn cutoff_stability_check(
    surface: &WarpedSurface,
    spin: SpinStructure,
    phi: &Section,
    rhos: &[f64],
    center: f64,
) -> Result<CutoffReport> {
    if phi.kind() != SectionKind::Spinor {
        return Err(Error::arg("cutoff check needs a spinor section"));
    }
    if rhos.is_empty() {
        return Err(Error::arg("empty cutoff radius sequence"));
    }
    let grid: Grid = *phi.grid();
    if !(center >= grid.start() && center <= grid.end()) {
        return Err(Error::arg(format!("cutoff center {center} lies outside the grid")));
    }
    let radius = (center - grid.start()).max(grid.end() - center);
    let d = DiscreteDirac::new(surface, spin, phi.mode(), &grid)?;
    let nodes = phi.spinor_nodes();
    let d_phi = d.apply(&nodes);
    let phi_norm = d.norm(&nodes[..grid.intervals()]);
    let h = grid.h();
    let mut levels = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        if !(rho > 0.0) || rho > radius * (1.0 + 1e-12) {
            return Err(Error::arg(format!("cutoff radius {rho} exceeds the domain radius {radius}")));
        }
        let g = TestFunction::from_fn(&grid, cutoff_function(rho, center));
        let cut: Vec<[f64; 2]> = nodes.iter().zip(&g.values).map(|([a, b], f)| [f * a, f * b]).collect();
        let d_cut = d.apply(&cut);
        let diff: Vec<[f64; 2]> = d_cut.iter().zip(&d_phi).map(|(x, y)| [x[0] - y[0], x[1] - y[1]]).collect();
        let tail: Vec<[f64; 2]> =
            d_phi.iter().zip(&g.values).map(|([a, b], f)| [(f - 1.0) * a, (f - 1.0) * b]).collect();
        let slack = leibniz_defect(surface, spin, phi.mode(), &grid, &g, phi)?;
        let max_slope = g.values.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
        levels.push(CutoffLevel {
            rho,
            defect: d.norm(&diff),
            allowance: phi_norm / rho + d.norm(&tail) + slack,
            max_slope,
        });
    }
    let within_allowance = levels.iter().all(|l| l.defect <= l.allowance * (1.0 + 1e-12) + 1e-14);
    let decreasing = levels.windows(2).all(|w| w[1].defect <= w[0].defect + 1e-14);
    let slope_audit = levels.iter().all(|l| l.max_slope <= 1.0 / l.rho + 1e-12);
    Ok(CutoffReport { center, levels, within_allowance, decreasing, slope_audit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{friedrich_check, Statistic};
    use crate::eigensolve::{fundamental_tone, ToneTarget};
    use crate::operators::assemble_dirac_square;

    #[test]
    fn cutoff_shape() {
        let f = cutoff_function(2.0, 0.0);
        assert_eq!(f(1.9).0, 1.0);
        assert_eq!(f(-2.0).0, 1.0);
        assert_eq!(f(6.0).0, 0.0);
        assert!((f(4.0).0 - 0.5).abs() < 1e-15);
        assert!((f(4.0).1 + 0.375).abs() < 1e-15);
        assert!((f(-4.0).1 - 0.375).abs() < 1e-15);
    }

    #[test]
    fn compact_support_has_zero_defect() {
        let s = WarpedSurface::flat_cylinder(10.0);
        let grid = Grid::new(0.0, 10.0, 400).unwrap();
        let op = assemble_dirac_square(&s, SpinStructure::NonBounding, 0.0, &grid).unwrap();
        let bump = |t: f64| {
            let x = t - 5.0;
            if x.abs() < 1.0 {
                [(1.0 - x * x).powi(3), 0.0]
            } else {
                [0.0, 0.0]
            }
        };
        let phi = Section::spinor(&op, bump).unwrap();
        let r = cutoff_stability_check(&s, SpinStructure::NonBounding, &phi, &[1.5, 3.0], 5.0).unwrap();
        for l in &r.levels {
            assert_eq!(l.defect, 0.0);
        }
        assert!(r.passed());
    }

    #[test]
    fn long_cylinder_defect_decreases() {
        let l = 40.0;
        let s = WarpedSurface::flat_cylinder(l);
        let grid = Grid::new(0.0, l, 1600).unwrap();
        let op = assemble_dirac_square(&s, SpinStructure::NonBounding, 0.0, &grid).unwrap();
        let phi = Section::spinor(&op, |t| [(std::f64::consts::PI * t / l).sin(), 0.0]).unwrap();
        let r = cutoff_stability_check(&s, SpinStructure::NonBounding, &phi, &[l / 8.0, l / 4.0, l / 2.0], l / 2.0)
            .unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.levels[0].defect > r.levels[1].defect);
        assert!(r.levels[2].defect < 1e-12);
        let err = cutoff_stability_check(&s, SpinStructure::NonBounding, &phi, &[l], l / 2.0).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn sphere_is_an_equality_case() {
        let s = WarpedSurface::round_sphere();
        let spin = SpinStructure::Bounding;
        let policy = GridPolicy { intervals: 256, ..Default::default() };
        let tone = fundamental_tone(&s, FieldKind::Spinor(spin), ToneTarget::Lowest, &policy).unwrap();
        let stat = Statistic { value: tone.lambda_star, error: tone.error, source: "tone".into() };
        let fv = friedrich_check(0.5, &stat, 3.0);
        let k = killing_equality_check(&s, spin, &tone, &fv, &policy).unwrap();
        assert!(k.applicable);
        assert!(k.passed(), "{k:?}");
    }

    #[test]
    fn cylinder_is_not_an_equality_case() {
        let s = WarpedSurface::flat_cylinder(5.0);
        let spin = SpinStructure::Bounding;
        let policy = GridPolicy { intervals: 128, ..Default::default() };
        let tone = fundamental_tone(&s, FieldKind::Spinor(spin), ToneTarget::Lowest, &policy).unwrap();
        let stat = Statistic { value: tone.lambda_star, error: tone.error, source: "tone".into() };
        let fv = friedrich_check(0.0, &stat, 3.0);
        let k = killing_equality_check(&s, spin, &tone, &fv, &policy).unwrap();
        assert!(!k.applicable);
        assert!(k.passed());
    }
}
