use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary treatment at one end of a grid window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// The end node is fixed at zero and dropped from the unknowns.
    Dirichlet,
    /// The end node is free; the weak form imposes the natural condition.
    /// Used near removable or conical poles, where the closure of the
    /// quadratic form on compactly supported sections does not pin values.
    Natural,
}

/// Uniform grid on the closed window `[start, end]`, `intervals + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    start: f64,
    end: f64,
    intervals: usize,
    bc: [BoundaryCondition; 2],
}

pub const MIN_NODES: usize = 16;

impl Grid {
    /// Dirichlet at both ends.
    pub fn new(start: f64, end: f64, intervals: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::arg(format!("grid window [{start}, {end}] is not a finite interval")));
        }
        if intervals + 1 < MIN_NODES {
            return Err(Error::arg(format!("grid needs at least {MIN_NODES} nodes, got {}", intervals + 1)));
        }
        Ok(Grid { start, end, intervals, bc: [BoundaryCondition::Dirichlet; 2] })
    }

    pub fn with_bc(mut self, lower: BoundaryCondition, upper: BoundaryCondition) -> Self {
        self.bc = [lower, upper];
        self
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn bc(&self) -> [BoundaryCondition; 2] {
        self.bc
    }

    pub fn h(&self) -> f64 {
        (self.end - self.start) / self.intervals as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.intervals {
            self.end
        } else {
            self.start + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.intervals).map(move |j| self.node(j))
    }

    pub fn midpoint(&self, e: usize) -> f64 {
        self.start + (e as f64 + 0.5) * self.h()
    }

    /// Node index range of the unknowns (Dirichlet ends excluded).
    pub fn unknown_range(&self) -> std::ops::Range<usize> {
        let lo = match self.bc[0] {
            BoundaryCondition::Dirichlet => 1,
            BoundaryCondition::Natural => 0,
        };
        let hi = match self.bc[1] {
            BoundaryCondition::Dirichlet => self.intervals,
            BoundaryCondition::Natural => self.intervals + 1,
        };
        lo..hi
    }

    pub fn unknowns(&self) -> usize {
        self.unknown_range().len()
    }

    /// Quadrature cell length attached to node `j` (half cells at the ends).
    pub fn cell(&self, j: usize) -> f64 {
        if j == 0 || j == self.intervals {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// Same window and boundary conditions with `factor` times the intervals.
    pub fn refined(&self, factor: usize) -> Self {
        Grid { intervals: self.intervals * factor, ..*self }
    }

    /// True when `self` lies inside `other` and both share node positions
    /// (same spacing, aligned offsets).
    pub fn nested_in(&self, other: &Grid) -> bool {
        let tol = 1e-9 * other.h();
        let aligned = ((self.start - other.start) / other.h()).fract();
        self.start >= other.start - tol
            && self.end <= other.end + tol
            && (self.h() - other.h()).abs() <= tol
            && (aligned.min(1.0 - aligned)).abs() <= 1e-7
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_unknowns() {
        let g = Grid::new(0.0, 1.0, 20).unwrap();
        assert!((g.h() - 0.05).abs() < 1e-15);
        assert_eq!(g.unknowns(), 19);
        assert_eq!(g.node(20), 1.0);
        let n = g.with_bc(BoundaryCondition::Natural, BoundaryCondition::Dirichlet);
        assert_eq!(n.unknowns(), 20);
        assert_eq!(n.unknown_range(), 0..20);
    }

    #[test]
    fn too_few_nodes() {
        assert!(Grid::new(0.0, 1.0, 14).is_err());
        assert!(Grid::new(0.0, 1.0, 15).is_ok());
        assert!(Grid::new(1.0, 1.0, 40).is_err());
    }

    #[test]
    fn nesting() {
        let big = Grid::new(0.0, 4.0, 64).unwrap();
        let small = Grid::new(1.0, 3.0, 32).unwrap();
        assert!(small.nested_in(&big));
        let shifted = Grid::new(1.01, 3.01, 32).unwrap();
        assert!(!shifted.nested_in(&big));
    }
}
