//! Per-frequency spectra of D² on a flat cylinder against `ν² + π²j²/L²`.

use std::f64::consts::PI;

use diraclab::eigensolve::smallest_eigenpairs;
use diraclab::geometry::WarpedSurface;
use diraclab::operators::{assemble_dirac_square, Grid};
use diraclab::spin_fourier::{enumerate_modes, FieldKind, SpinStructure};

pub fn main() {
    let l = 5.0;
    let surface = WarpedSurface::flat_cylinder(l);
    let grid = Grid::new(0.0, l, 400).unwrap();
    for spin in [SpinStructure::Bounding, SpinStructure::NonBounding] {
        let modes = enumerate_modes(FieldKind::Spinor(spin), surface.period, 3).unwrap();
        println!("{}", spin.name());
        for nu in modes.nonnegative() {
            let op = assemble_dirac_square(&surface, spin, nu, &grid).unwrap();
            let pairs = smallest_eigenpairs(&op, 4).unwrap();
            let exact: Vec<f64> =
                [1, 1, 2, 2].iter().map(|&j: &i32| nu * nu + PI * PI * (j * j) as f64 / (l * l)).collect();
            println!("  ν = {nu:<4} computed {:.6?}", pairs.eigenvalues);
            println!("  {:<8} exact    {exact:.6?}", "");
        }
    }
}
