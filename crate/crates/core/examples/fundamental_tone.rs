//! Extrapolated fundamental tones on the round sphere, mode by mode.

use diraclab::eigensolve::{fundamental_tone, GridPolicy, ToneTarget};
use diraclab::geometry::WarpedSurface;
use diraclab::spin_fourier::{FieldKind, SpinStructure};

pub fn main() {
    let sphere = WarpedSurface::round_sphere();
    let policy = GridPolicy::default();
    for (name, field, target) in [
        ("Laplace, first nonzero", FieldKind::Scalar, ToneTarget::FirstNonzero),
        ("Dirac squared", FieldKind::Spinor(SpinStructure::Bounding), ToneTarget::Lowest),
    ] {
        let t = fundamental_tone(&sphere, field, target, &policy).unwrap();
        println!(
            "{name}: λ* = {:.10} ± {:.1e} at ν = {} ({:?}, certified {})",
            t.lambda_star, t.error, t.mode, t.solver, t.certified
        );
        for m in t.per_mode.iter().take(4) {
            println!("    ν = {:<4} {:.10} ± {:.1e}", m.mode, m.value, m.error);
        }
    }
}
