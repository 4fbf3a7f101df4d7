//! Verdicts of the area bound on flat cylinders for both spin structures.

use std::f64::consts::PI;

use diraclab::bounds::{baer_check, Statistic, DEFAULT_TOL_FACTOR};
use diraclab::eigensolve::{fundamental_tone, GridPolicy, ToneTarget};
use diraclab::geometry::{area, WarpedSurface};
use diraclab::spin_fourier::{FieldKind, SpinStructure};

pub fn main() {
    let policy = GridPolicy::default();
    for l in [2.0, 5.0, 10.0] {
        let s = WarpedSurface::flat_cylinder(l);
        for spin in [SpinStructure::Bounding, SpinStructure::NonBounding] {
            let t = fundamental_tone(&s, FieldKind::Spinor(spin), ToneTarget::Lowest, &policy).unwrap();
            let stat = Statistic { value: t.lambda_star, error: t.error, source: "tone".into() };
            let v = baer_check(&s, spin, area(&s).ok(), &stat, DEFAULT_TOL_FACTOR);
            println!(
                "L = {l:<4} {:<12} λ* {:.6} (π²/L² = {:.6})  4π/area {:.6}  {}",
                spin.name(),
                v.computed,
                PI * PI / (l * l),
                v.formula_value,
                v.verdict.as_str()
            );
        }
    }
}
