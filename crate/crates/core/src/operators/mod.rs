//! Per-Fourier-mode discretizations of the Laplace–Beltrami operator and of
//! the square of the spinor Dirac operator.
//!
//! Each mode `ν` reduces to a Sturm–Liouville problem on the parameter
//! interval with weight `P f(t)`. Stiffness matrices come from the weak form
//! on a uniform grid (element values at midpoints), masses are lumped
//! trapezoid weights, and the boundary condition at each window end is
//! either Dirichlet or natural (see [`BoundaryCondition`]).
//!
//! The spinor bundle is trivialized along the orthonormal frame
//! `(∂_t, f⁻¹∂_φ)`. In that frame a mode-`ν` spinor `(u, v) e^{iνφ}` sees
//!
//! ```text
//!   D = [ 0   A⁺ ]      A  = d/dt + f'/(2f) + ν/f
//!       [ A   0  ]      A⁺ = -d/dt - f'/(2f) + ν/f   (adjoint in L²(f dt))
//! ```
//!
//! so `D² = A⁺A ⊕ AA⁺`. Both blocks are assembled as `‖A_{±ν} u‖²`, which
//! keeps each block positive semidefinite at the discrete level. Expanding
//! the square gives the Bochner split `|∇u|² + (scal/4)|u|²` with
//! connection energy `f u'² + (f'/2 ± ν)² u²/f`.
//!
//! At a natural window end the kernel `f^{-1/2} exp(∓ν∫dt/f)` of each
//! first-order factor survives truncation. It belongs to the Friedrichs
//! domain only when it stays bounded at that end; otherwise the block's end
//! node is pinned (row and column decoupled, diagonal moved far above the
//! spectrum), which is Dirichlet elimination without changing the layout.

mod grid;
mod matrix_market;
mod section;

pub use grid::{BoundaryCondition, Grid, MIN_NODES};
pub use matrix_market::MatrixKind;
pub use section::{Section, SectionKind, TestFunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::WarpedSurface;
use crate::spin_fourier::SpinStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    LaplacianScalar,
    DiracSquare,
}

/// Symmetric tridiagonal matrix; `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        SymTridiagonal { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Dense row-major copy, for tests and debugging.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.off[i];
                m[i + 1][i] = self.off[i];
            }
        }
        m
    }
}

/// Lumped `P f(t_i)` times the node cell length, one weight per unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMatrix {
    pub weights: Vec<f64>,
}

impl MassMatrix {
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weights.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| w * a * b).sum()
    }
}

/// A discrete, symmetric, one-mode operator: the pair (stiffness, mass).
///
/// Spinor operators stack the `A⁺A` block over the `AA⁺` block; the
/// stiffness coupling between the two blocks is exactly zero.
#[derive(Debug, Clone)]
pub struct ReducedOperator {
    pub kind: OperatorKind,
    pub mode: f64,
    pub period: f64,
    pub grid: Grid,
    pub stiffness: SymTridiagonal,
    pub mass: MassMatrix,
    block_len: usize,
    /// `scal/4` at each unknown node.
    quarter_scal: Vec<f64>,
    /// Unknown indices decoupled as Dirichlet ends.
    pinned: Vec<usize>,
}

impl ReducedOperator {
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn blocks(&self) -> usize {
        self.stiffness.len() / self.block_len.max(1)
    }

    pub fn len(&self) -> usize {
        self.stiffness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stiffness.is_empty()
    }

    /// Node positions of the unknowns of one block.
    pub fn unknown_nodes(&self) -> Vec<f64> {
        self.grid.unknown_range().map(|j| self.grid.node(j)).collect()
    }

    /// Unknowns eliminated as Dirichlet ends; sections should vanish there.
    pub fn pinned(&self) -> &[usize] {
        &self.pinned
    }

    pub fn section_kind(&self) -> SectionKind {
        match self.kind {
            OperatorKind::LaplacianScalar => SectionKind::Scalar,
            OperatorKind::DiracSquare => SectionKind::Spinor,
        }
    }

    /// Symmetrically scaled matrix `M^{-1/2} K M^{-1/2}`; same spectrum as
    /// the generalized pair.
    pub fn scaled(&self) -> SymTridiagonal {
        let s: Vec<f64> = self.mass.weights.iter().map(|w| w.sqrt().recip()).collect();
        SymTridiagonal {
            diag: self.stiffness.diag.iter().zip(&s).map(|(d, si)| d * si * si).collect(),
            off: self.stiffness.off.iter().enumerate().map(|(i, o)| o * s[i] * s[i + 1]).collect(),
        }
    }

    /// Lower bound for the spectrum from the potential term alone.
    pub fn potential_floor(&self) -> f64 {
        // Gershgorin on the scaled matrix; cheap and always valid.
        let t = self.scaled();
        let n = t.len();
        (0..n)
            .map(|i| {
                let mut r = 0.0;
                if i > 0 {
                    r += t.off[i - 1].abs();
                }
                if i + 1 < n {
                    r += t.off[i].abs();
                }
                t.diag[i] - r
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn check_section(&self, phi: &Section) -> Result<()> {
        if phi.kind() != self.section_kind() {
            return Err(Error::arg("section kind does not match the operator"));
        }
        if phi.values().len() != self.len() || phi.grid() != &self.grid {
            return Err(Error::arg("section is not sampled on the operator grid"));
        }
        Ok(())
    }

    pub fn write_matrix_market<W: std::io::Write>(&self, which: MatrixKind, out: W) -> Result<()> {
        matrix_market::write(self, which, out)
    }
}

struct Samples {
    /// `(f, f')` at every grid node.
    node: Vec<(f64, f64, f64)>,
    /// `(f, f')` at every element midpoint.
    mid: Vec<(f64, f64)>,
}

fn sample_warp(surface: &WarpedSurface, grid: &Grid) -> Result<Samples> {
    let mut node = Vec::with_capacity(grid.intervals() + 1);
    for t in grid.nodes() {
        surface.check_closed(t).map_err(|e| Error::Assembly(e.to_string()))?;
        let v = surface.warp.eval(t);
        if !(v.0 > 0.0) {
            return Err(Error::Assembly(format!("warp is not positive at t = {t}")));
        }
        node.push(v);
    }
    let mid = (0..grid.intervals())
        .map(|e| {
            let (f, df, _) = surface.warp.eval(grid.midpoint(e));
            (f, df)
        })
        .collect::<Vec<_>>();
    if mid.iter().any(|(f, _)| !(*f > 0.0)) {
        return Err(Error::Assembly("warp is not positive at an element midpoint".into()));
    }
    Ok(Samples { node, mid })
}

fn mass_weights(surface: &WarpedSurface, grid: &Grid, s: &Samples) -> Vec<f64> {
    grid.unknown_range().map(|j| surface.period * s.node[j].0 * grid.cell(j)).collect()
}

/// Weak-form Laplacian for Fourier mode `ν`:
/// `P ∫ (f u'v' + ν² u v / f) dt` against the mass `P ∫ f u v dt`.
pub fn assemble_laplacian(surface: &WarpedSurface, nu: f64, grid: &Grid) -> Result<ReducedOperator> {
    let s = sample_warp(surface, grid)?;
    let range = grid.unknown_range();
    let n = range.len();
    let h = grid.h();
    let p = surface.period;
    let mut k = SymTridiagonal::zeros(n);
    let idx = |j: usize| range.contains(&j).then(|| j - range.start);
    for e in 0..grid.intervals() {
        let w = p * s.mid[e].0 / h;
        let (a, b) = (idx(e), idx(e + 1));
        if let Some(a) = a {
            k.diag[a] += w;
        }
        if let Some(b) = b {
            k.diag[b] += w;
        }
        if let (Some(a), Some(_)) = (a, b) {
            k.off[a] -= w;
        }
    }
    for j in range.clone() {
        k.diag[j - range.start] += p * nu * nu * grid.cell(j) / s.node[j].0;
    }
    let quarter_scal = range.clone().map(|j| -s.node[j].2 / (2.0 * s.node[j].0)).collect();
    Ok(ReducedOperator {
        kind: OperatorKind::LaplacianScalar,
        mode: nu,
        period: p,
        grid: *grid,
        stiffness: k,
        mass: MassMatrix { weights: mass_weights(surface, grid, &s) },
        block_len: n,
        quarter_scal,
        pinned: Vec::new(),
    })
}

/// Assembles `‖A_σ u‖²` with `A_σ = d/dt + (f'/2 + σ)/f`, midpoint rule per
/// element, into `k` at row offset `base`.
fn assemble_dirac_block(k: &mut SymTridiagonal, base: usize, sigma: f64, p: f64, grid: &Grid, s: &Samples) {
    let range = grid.unknown_range();
    let h = grid.h();
    let idx = |j: usize| range.contains(&j).then(|| base + j - range.start);
    for e in 0..grid.intervals() {
        let (f, df) = s.mid[e];
        let c = (0.5 * df + sigma) / f;
        let w = p * f * h;
        let alpha = -1.0 / h + 0.5 * c;
        let beta = 1.0 / h + 0.5 * c;
        let (a, b) = (idx(e), idx(e + 1));
        if let Some(a) = a {
            k.diag[a] += w * alpha * alpha;
        }
        if let Some(b) = b {
            k.diag[b] += w * beta * beta;
        }
        if let (Some(a), Some(_)) = (a, b) {
            k.off[a] += w * alpha * beta;
        }
    }
}

/// `D²` restricted to spinor mode `ν`: the direct sum `A⁺A ⊕ AA⁺`.
pub fn assemble_dirac_square(
    surface: &WarpedSurface,
    spin: SpinStructure,
    nu: f64,
    grid: &Grid,
) -> Result<ReducedOperator> {
    if !spin.admits(nu, surface.period) {
        return Err(Error::arg(format!(
            "frequency {nu} is not a spinor frequency of the {} structure with period {}",
            spin.name(),
            surface.period
        )));
    }
    let s = sample_warp(surface, grid)?;
    let range = grid.unknown_range();
    let n = range.len();
    let mut k = SymTridiagonal::zeros(2 * n);
    assemble_dirac_block(&mut k, 0, nu, surface.period, grid, &s);
    // AA⁺ = A_{-ν}⁺ A_{-ν} up to the sign of A⁺ = -A_{-ν}.
    assemble_dirac_block(&mut k, n, -nu, surface.period, grid, &s);
    debug_assert_eq!(k.off[n - 1], 0.0);
    let w = mass_weights(surface, grid, &s);
    let mut weights = w.clone();
    weights.extend_from_slice(&w);
    let quarter_scal = range.map(|j| -s.node[j].2 / (2.0 * s.node[j].0)).collect();
    let pinned = pin_unbounded_kernels(&mut k, &weights, nu, grid, &s);
    Ok(ReducedOperator {
        kind: OperatorKind::DiracSquare,
        mode: nu,
        period: surface.period,
        grid: *grid,
        stiffness: k,
        mass: MassMatrix { weights },
        block_len: n,
        quarter_scal,
        pinned,
    })
}

/// Multiple of the largest diagonal ratio used for pinned nodes.
const PIN_SCALE: f64 = 1e4;

/// Pins natural end nodes of each block where the first-order kernel
/// `w = √f u ~ s^e` (`s` = distance to the end) has `e < 1/2`.
fn pin_unbounded_kernels(k: &mut SymTridiagonal, weights: &[f64], nu: f64, grid: &Grid, s: &Samples) -> Vec<usize> {
    let n = weights.len() / 2;
    let top = k.diag.iter().zip(weights).map(|(d, w)| d / w).fold(0.0, f64::max);
    let mut pinned = Vec::new();
    for (b, sigma) in [nu, -nu].into_iter().enumerate() {
        for upper in [false, true] {
            if grid.bc()[usize::from(upper)] != BoundaryCondition::Natural {
                continue;
            }
            let node = if upper { grid.intervals() } else { 0 };
            let slope = s.node[node].1.abs().max(f64::MIN_POSITIVE);
            let e = if upper { sigma / slope } else { -sigma / slope };
            if e >= 0.5 - 1e-9 {
                continue;
            }
            let i = b * n + if upper { n - 1 } else { 0 };
            if i > 0 {
                k.off[i - 1] = 0.0;
            }
            if i < k.off.len() {
                k.off[i] = 0.0;
            }
            k.diag[i] = PIN_SCALE * top.max(1.0) * weights[i];
            pinned.push(i);
        }
    }
    pinned.sort_unstable();
    pinned
}

/// `(Kφ, φ) / (Mφ, φ)`.
pub fn rayleigh_quotient(op: &ReducedOperator, phi: &Section) -> Result<f64> {
    op.check_section(phi)?;
    let norm = op.mass.inner(phi.values(), phi.values());
    if !(norm > 0.0) {
        return Err(Error::arg("Rayleigh quotient of a zero section"));
    }
    Ok(op.stiffness.quadratic_form(phi.values()) / norm)
}

/// Discrete `‖∇φ‖² = ‖Dφ‖² − (𝒦φ, φ)` with `𝒦 = scal/4` per node.
pub fn bochner_gradient_energy(surface: &WarpedSurface, op: &ReducedOperator, phi: &Section) -> Result<f64> {
    op.check_section(phi)?;
    if op.kind != OperatorKind::DiracSquare {
        return Err(Error::arg("Bochner energy is defined for spinor operators"));
    }
    if op.period != surface.period {
        return Err(Error::arg("operator and surface disagree on the circle period"));
    }
    let dirac = op.stiffness.quadratic_form(phi.values());
    let n = op.block_len;
    let v = phi.values();
    let curvature: f64 = (0..op.len()).map(|i| op.mass.weights[i] * op.quarter_scal[i % n] * v[i] * v[i]).sum();
    Ok(dirac - curvature)
}

/// First-order nodal Dirac operator for one spinor mode on a full grid
/// (Dirichlet ends included as nodes). Forward differences; the output at
/// node `j` uses nodes `j` and `j + 1`, so it has `intervals` entries.
#[derive(Debug, Clone)]
pub struct DiscreteDirac {
    grid: Grid,
    /// `(f'/2 + ν)/f` and `(f'/2 − ν)/f` at each node.
    coef: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl DiscreteDirac {
    pub fn new(surface: &WarpedSurface, spin: SpinStructure, nu: f64, grid: &Grid) -> Result<Self> {
        if !spin.admits(nu, surface.period) {
            return Err(Error::arg(format!("frequency {nu} is not admitted by the {} structure", spin.name())));
        }
        let s = sample_warp(surface, grid)?;
        let coef = s.node.iter().map(|&(f, df, _)| ((0.5 * df + nu) / f, (0.5 * df - nu) / f)).collect();
        let weights = s.node.iter().take(grid.intervals()).map(|&(f, _, _)| surface.period * f * grid.h()).collect();
        Ok(DiscreteDirac { grid: *grid, coef, weights })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `D(u, v) = (A⁺v, Au)` at nodes `0..intervals`.
    pub fn apply(&self, phi: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let h = self.grid.h();
        (0..self.grid.intervals())
            .map(|j| {
                let (cp, cm) = self.coef[j];
                let [u0, v0] = phi[j];
                let [u1, v1] = phi[j + 1];
                let au = (u1 - u0) / h + cp * u0;
                let adv = -((v1 - v0) / h + cm * v0);
                [adv, au]
            })
            .collect()
    }

    /// Weighted `L²` norm over nodes `0..intervals` of a nodal spinor field.
    pub fn norm(&self, psi: &[[f64; 2]]) -> f64 {
        self.weights.iter().zip(psi).map(|(w, [a, b])| w * (a * a + b * b)).sum::<f64>().sqrt()
    }
}

/// Clifford action of `∂_t` on `(u, v)`.
fn clifford_dt([u, v]: [f64; 2]) -> [f64; 2] {
    [-v, u]
}

/// `‖D(gφ) − grad g · φ − g Dφ‖` with the first-order nodal Dirac operator.
///
/// `φ` is a spinor section on the unknowns of `grid`; Dirichlet end nodes are
/// filled with zeros.
pub fn leibniz_defect(
    surface: &WarpedSurface,
    spin: SpinStructure,
    nu: f64,
    grid: &Grid,
    g: &TestFunction,
    phi: &Section,
) -> Result<f64> {
    if phi.kind() != SectionKind::Spinor || phi.grid() != grid {
        return Err(Error::arg("Leibniz defect needs a spinor section on the given grid"));
    }
    if g.len() != grid.intervals() + 1 {
        return Err(Error::arg("test function must be sampled at every grid node"));
    }
    let d = DiscreteDirac::new(surface, spin, nu, grid)?;
    let full = phi.spinor_nodes();
    let product: Vec<[f64; 2]> = full.iter().zip(&g.values).map(|([u, v], gj)| [gj * u, gj * v]).collect();
    let d_product = d.apply(&product);
    let d_phi = d.apply(&full);
    let defect: Vec<[f64; 2]> = (0..grid.intervals())
        .map(|j| {
            let c = clifford_dt(full[j]);
            let gj = g.values[j];
            let dg = g.gradient[j];
            [d_product[j][0] - dg * c[0] - gj * d_phi[j][0], d_product[j][1] - dg * c[1] - gj * d_phi[j][1]]
        })
        .collect();
    Ok(d.norm(&defect))
}
