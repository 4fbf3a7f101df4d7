use serde::{Deserialize, Serialize};

use super::{Grid, ReducedOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    Scalar,
    Spinor,
}

/// Grid samples of one Fourier mode of a function or spinor field.
///
/// Values live on the unknowns of the grid. Spinor sections are stored
/// component-major: all `u` values, then all `v` values, matching the block
/// layout of [`ReducedOperator`]. Per-mode sections are real.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    kind: SectionKind,
    mode: f64,
    grid: Grid,
    values: Vec<f64>,
}

impl Section {
    pub fn new(kind: SectionKind, mode: f64, grid: Grid, values: Vec<f64>) -> Result<Self> {
        let per = match kind {
            SectionKind::Scalar => 1,
            SectionKind::Spinor => 2,
        };
        if values.len() != per * grid.unknowns() {
            return Err(Error::arg(format!(
                "section has {} values, grid expects {}",
                values.len(),
                per * grid.unknowns()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("section values must be finite"));
        }
        Ok(Section { kind, mode, grid, values })
    }

    /// Samples a scalar profile on the unknowns of `op`.
    pub fn scalar(op: &ReducedOperator, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let values = op.unknown_nodes().into_iter().map(profile).collect();
        Section::new(SectionKind::Scalar, op.mode, op.grid, values)
    }

    /// Samples a two-component profile on the unknowns of `op`, zero at
    /// pinned ends.
    pub fn spinor(op: &ReducedOperator, profile: impl Fn(f64) -> [f64; 2]) -> Result<Self> {
        let samples: Vec<[f64; 2]> = op.unknown_nodes().into_iter().map(profile).collect();
        let mut section = Section::from_components(op.mode, op.grid, &samples);
        for &i in op.pinned() {
            section.values[i] = 0.0;
        }
        Ok(section)
    }

    pub(crate) fn from_components(mode: f64, grid: Grid, samples: &[[f64; 2]]) -> Self {
        let mut values: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        values.extend(samples.iter().map(|s| s[1]));
        Section { kind: SectionKind::Spinor, mode, grid, values }
    }

    pub fn kind(&self) -> SectionKind {
        self.kind
    }

    pub fn mode(&self) -> f64 {
        self.mode
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ w_i |φ_i|²` with the operator's mass.
    pub fn norm_sq(&self, op: &ReducedOperator) -> f64 {
        op.mass.inner(&self.values, &self.values)
    }

    /// Spinor samples at every grid node, zeros at Dirichlet ends.
    pub fn spinor_nodes(&self) -> Vec<[f64; 2]> {
        let n = self.grid.unknowns();
        let range = self.grid.unknown_range();
        let mut out = vec![[0.0; 2]; self.grid.intervals() + 1];
        match self.kind {
            SectionKind::Spinor => {
                for (i, j) in range.enumerate() {
                    out[j] = [self.values[i], self.values[n + i]];
                }
            }
            SectionKind::Scalar => {
                for (i, j) in range.enumerate() {
                    out[j] = [self.values[i], 0.0];
                }
            }
        }
        out
    }

    /// Scalar samples at every grid node, zeros at Dirichlet ends.
    pub fn scalar_nodes(&self) -> Vec<f64> {
        self.spinor_nodes().into_iter().map(|s| s[0]).collect()
    }
}

/// A function on the grid nodes together with its `t`-derivative, used as
/// the multiplier in Leibniz-rule and cutoff checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub values: Vec<f64>,
    pub gradient: Vec<f64>,
}

impl TestFunction {
    pub fn from_fn(grid: &Grid, g: impl Fn(f64) -> (f64, f64)) -> Self {
        let (values, gradient) = grid.nodes().map(g).unzip();
        TestFunction { values, gradient }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
