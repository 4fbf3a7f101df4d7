//! Matrix Market dump of assembled operators.
//!
//! Format (stable): a `coordinate real symmetric` header, comment lines with
//! `key=value` metadata, a size line, then the lower triangle in 1-based
//! `row col value` triples, row-major, values in `{:.17e}`. The mass matrix
//! is written as its diagonal in the same format.

use std::io::Write;

use super::{OperatorKind, ReducedOperator};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Stiffness,
    Mass,
}

pub(super) fn write<W: Write>(op: &ReducedOperator, which: MatrixKind, mut out: W) -> Result<()> {
    let n = op.len();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    match which {
        MatrixKind::Stiffness => {
            for i in 0..n {
                if i > 0 && op.stiffness.off[i - 1] != 0.0 {
                    entries.push((i + 1, i, op.stiffness.off[i - 1]));
                }
                entries.push((i + 1, i + 1, op.stiffness.diag[i]));
            }
        }
        MatrixKind::Mass => {
            entries.extend(op.mass.weights.iter().enumerate().map(|(i, w)| (i + 1, i + 1, *w)));
        }
    }
    let kind = match op.kind {
        OperatorKind::LaplacianScalar => "laplacian_scalar",
        OperatorKind::DiracSquare => "dirac_square",
    };
    let matrix = match which {
        MatrixKind::Stiffness => "stiffness",
        MatrixKind::Mass => "mass",
    };
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "% matrix={matrix}")?;
    writeln!(out, "% kind={kind}")?;
    writeln!(out, "% mode={:.17e}", op.mode)?;
    writeln!(out, "% period={:.17e}", op.period)?;
    writeln!(out, "% window={:.17e},{:.17e}", op.grid.start(), op.grid.end())?;
    writeln!(out, "% intervals={}", op.grid.intervals())?;
    let [lo, hi] = op.grid.bc();
    writeln!(out, "% bc={lo:?},{hi:?}")?;
    writeln!(out, "% blocks={}", op.blocks())?;
    writeln!(out, "{n} {n} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v:.17e}")?;
    }
    Ok(())
}
