//! Builds the built-in surfaces and prints area, curvature bounds and ends.

use diraclab::eigensolve::GridPolicy;
use diraclab::geometry::{area, curvature_profile, kappa_at_infinity, WarpedSurface};
use diraclab::scenarios::Scenario;

pub fn main() {
    let policy = GridPolicy::default();
    let surfaces = [
        ("round sphere", WarpedSurface::round_sphere()),
        ("3-fold cover", WarpedSurface::sphere_cover(3)),
        ("flat cylinder L=5", WarpedSurface::flat_cylinder(5.0)),
        ("cusped cylinder", Scenario::cusp_cylinder(10.0, std::f64::consts::PI).unwrap().surface),
        ("growing curvature", Scenario::growing_curvature().unwrap().surface),
    ];
    for (name, s) in &surfaces {
        let grid = policy.window(s, 256, policy.pole_offset).unwrap();
        let p = curvature_profile(s, &grid).unwrap();
        let a = area(s).map_or("infinite".to_string(), |a| format!("{a:.6}"));
        println!(
            "{name:<18} area {a:>10}  inf scal/4 {:>9.5}  inf K {:>9.5}  κ∞ {:?}  ends {:?}",
            p.kappa_spinor,
            p.kappa_oneform,
            kappa_at_infinity(s, 0.1),
            s.ends()
        );
    }
    let json = surfaces[2].1.to_json().unwrap();
    assert_eq!(WarpedSurface::from_json(&json).unwrap(), surfaces[2].1);
    println!("{json}");
}
