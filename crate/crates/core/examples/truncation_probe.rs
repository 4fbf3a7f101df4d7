//! Eigenvalue counts below a threshold on growing windows: stable when
//! curvature grows at infinity, unbounded on a long flat cylinder.

use std::f64::consts::TAU;

use diraclab::eigensolve::truncation_probe;
use diraclab::geometry::{EndLabel, WarpFn, WarpedSurface};
use diraclab::operators::Grid;
use diraclab::spin_fourier::{FieldKind, SpinStructure};

pub fn main() {
    let half = WarpedSurface::new(
        0.0,
        f64::INFINITY,
        WarpFn::Constant { c: 1.0 },
        TAU,
        [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
    )
    .unwrap();
    let windows: Vec<Grid> =
        [10.0, 20.0, 40.0, 80.0].iter().map(|&l| Grid::new(0.0, l, (20.0 * l) as usize).unwrap()).collect();
    let r = truncation_probe(&half, FieldKind::Spinor(SpinStructure::NonBounding), &windows, 0.1).unwrap();
    println!("half cylinder, Λ = 0.1: counts {:?} stable {}", r.counts, r.stable);

    let s = diraclab::scenarios::Scenario::growing_curvature().unwrap();
    let w = s.surface.t_max;
    let windows: Vec<Grid> = [0.04, 0.02, 0.01].iter().map(|&d| Grid::new(-w + d, w - d, 512).unwrap()).collect();
    let r = truncation_probe(&s.surface, FieldKind::Spinor(SpinStructure::Bounding), &windows, 2.0).unwrap();
    println!("growing curvature, Λ = 2: counts {:?} stable {}", r.counts, r.stable);
}
