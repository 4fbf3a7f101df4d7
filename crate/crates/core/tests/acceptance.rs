//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use diraclab::bounds::cutoff_function;
use diraclab::bounds::{baer_bound, friedrich_bound, BoundName, SpectralReport, Verdict, KILLING_THRESHOLD};
use diraclab::cli::{cmd_sweep, cmd_verify, parse_sweep, Format, RunConfig, SweepRow};
use diraclab::eigensolve::{smallest_eigenpairs, tridiag, truncation_probe};
use diraclab::geometry::{EndLabel, WarpFn, WarpedSurface};
use diraclab::harness::run_scenario;
use diraclab::operators::{
    assemble_dirac_square, assemble_laplacian, bochner_gradient_energy, leibniz_defect, BoundaryCondition, Grid,
    Section, SectionKind, TestFunction,
};
use diraclab::scenarios::{cover_quotient, mk_orthogonality, test_section_norm_sq, PolicyOverrides, Scenario};
use diraclab::spin_fourier::{FieldKind, SpinStructure};

const SPHERE_LAPLACE_TOL: f64 = 1e-3;
const SPHERE_DIRAC_TOL: f64 = 1e-3;
const COVER_NORM_TOL: f64 = 1e-6;
const COVER_QUOTIENT_TOL: f64 = 1e-3;
const ORTHOGONALITY_TOL: f64 = 1e-12;
const CYLINDER_TOL: f64 = 1e-3;
const SPHERE_RUNTIME_SECS: f64 = 10.0;
const SPECTRUM_FLOOR: f64 = -1e-8;
const MODE_SYMMETRY_TOL: f64 = 1e-8;
const LEIBNIZ_RATIO: (f64, f64) = (1.7, 2.3);
const BOCHNER_FLOOR: f64 = -1e-8;
const CYLINDER_LENGTHS: [f64; 3] = [2.0, 5.0, 10.0];
const PROBE_THRESHOLD: f64 = 0.1;
const PROBE_LENGTHS: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn run(id: &str) -> SpectralReport {
    let scenario = match id {
        "RoundSphere" => Scenario::cover(1),
        _ => unreachable!(),
    }
    .unwrap();
    run_scenario(&scenario, &PolicyOverrides::default()).unwrap()
}

fn tone(r: &SpectralReport, name: &str) -> (f64, f64) {
    let t = r.diagnostics.tones.iter().find(|t| t.name == name).unwrap();
    (t.lambda_star, t.error)
}

fn verdict(r: &SpectralReport, b: BoundName) -> Verdict {
    r.verdict(b).unwrap().verdict
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" → ")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run("RoundSphere");
    let secs = start.elapsed().as_secs_f64();
    let (l, e) = tone(&r, "laplace_first_nonzero");
    let ok = (l - 2.0).abs() <= SPHERE_LAPLACE_TOL && secs < SPHERE_RUNTIME_SECS && r.provenance.intervals[0] == 512;
    check(ok, format!("λ₁(Δ) = {l:.10} ± {e:.1e}, |λ₁ − 2| ≤ {SPHERE_LAPLACE_TOL:e}; {secs:.2} s at N = 512"))
}

fn criterion_2() -> Outcome {
    let r = run("RoundSphere");
    let (d, _) = tone(&r, "dirac_square");
    let f = friedrich_bound(2, 0.5).unwrap().value;
    let b = baer_bound(4.0 * PI).value;
    let k = r.diagnostics.killing.as_ref().unwrap();
    let norm: Vec<f64> = k.levels.iter().map(|l| l.norm_variation).collect();
    let boch: Vec<f64> = k.levels.iter().map(|l| l.bochner_ratio).collect();
    let falling = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let small = |v: &[f64]| v.iter().all(|x| *x < KILLING_THRESHOLD);
    let ok = (d - 1.0).abs() <= SPHERE_DIRAC_TOL
        && (d - f).abs() <= SPHERE_DIRAC_TOL
        && (d - b).abs() <= SPHERE_DIRAC_TOL
        && k.applicable
        && small(&norm)
        && small(&boch)
        && falling(&norm)
        && falling(&boch);
    check(
        ok,
        format!(
            "λ*(D²) = {d:.10}, friedrich {f}, baer {b}; norm variation {}, bochner ratio {}",
            sci(&norm),
            sci(&boch)
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [2u32, 3, 5] {
        let s = Scenario::cover(k).unwrap();
        let norm = test_section_norm_sq(&s, "f_k").unwrap();
        let orth = mk_orthogonality(&s, "f_k").unwrap().abs();
        let r = run_scenario(&s, &PolicyOverrides::default()).unwrap();
        let rq = r.diagnostics.test_sections.iter().find(|t| t.name == "f_k").unwrap().rayleigh_quotient;
        let q = cover_quotient(k);
        let v = verdict(&r, BoundName::Lichnerowicz);
        ok &= (norm - 4.0 * k as f64 * PI / 3.0).abs() <= COVER_NORM_TOL
            && (rq - q).abs() <= COVER_QUOTIENT_TOL
            && orth <= ORTHOGONALITY_TOL
            && v == Verdict::ViolatedAsPredicted;
        notes.push(format!("k={k}: RQ {rq:.6} vs {q:.6}, {}", v.as_str()));
    }
    let sphere = run("RoundSphere");
    let v1 = verdict(&sphere, BoundName::Lichnerowicz);
    ok &= v1 == Verdict::Holds;
    notes.push(format!("k=1: {}", v1.as_str()));
    check(ok, notes.join("; "))
}

fn cylinder_tones(spin: SpinStructure, exact: impl Fn(f64) -> f64) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut notes = Vec::new();
    for l in CYLINDER_LENGTHS {
        let r = run_scenario(&Scenario::flat_cylinder(l, spin).unwrap(), &PolicyOverrides::default()).unwrap();
        let (d, _) = tone(&r, "dirac_square");
        ok &= (d - exact(l)).abs() <= CYLINDER_TOL;
        notes.push(format!("L={l}: {d:.6}"));
    }
    (ok, notes)
}

fn sweep(text: &str, spin: SpinStructure) -> (f64, Vec<SweepRow>) {
    let spec = parse_sweep(text).unwrap();
    let step = spec.values[1] - spec.values[0];
    (step, cmd_sweep(&spec, spin, "RoundSphere", &PolicyOverrides::default()).unwrap())
}

fn baer_margin(r: &SweepRow) -> f64 {
    r.bounds.iter().find(|b| b.bound == BoundName::Baer).unwrap().margin
}

fn criterion_4() -> Outcome {
    let (mut ok, mut notes) = cylinder_tones(SpinStructure::NonBounding, |l| PI * PI / (l * l));
    let (step, rows) = sweep("L=3:7:0.25", SpinStructure::NonBounding);
    let flips: Vec<(f64, f64)> = rows
        .windows(2)
        .filter(|w| baer_margin(&w[0]) > 0.0 && baer_margin(&w[1]) <= 0.0)
        .map(|w| (w[0].value, w[1].value))
        .collect();
    let crossover = PI * PI / 2.0;
    ok &= flips.len() == 1 && (flips[0].0 - crossover).abs() <= step && (flips[0].1 - crossover).abs() <= step;
    notes.push(format!("margin flips on {flips:?}, π²/2 = {crossover:.4}"));
    check(ok, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let (mut ok, mut notes) = cylinder_tones(SpinStructure::Bounding, |l| 0.25 + PI * PI / (l * l));
    let (_, rows) = sweep("L=1:20:1", SpinStructure::Bounding);
    let worst = rows.iter().map(baer_margin).fold(f64::INFINITY, f64::min);
    ok &= worst >= 0.0 && rows.iter().all(|r| r.dirac_tone.unwrap() >= 2.0 / r.value);
    notes.push(format!("min λ* − 2/L over L = 1..20: {worst:.4}"));
    check(ok, notes.join("; "))
}

fn sphere_grid(n: usize, delta: f64) -> Grid {
    Grid::new(-FRAC_PI_2 + delta, FRAC_PI_2 - delta, n)
        .unwrap()
        .with_bc(BoundaryCondition::Natural, BoundaryCondition::Natural)
}

fn property_surfaces() -> Vec<(WarpedSurface, Grid)> {
    vec![
        (WarpedSurface::round_sphere(), sphere_grid(128, 0.02)),
        (WarpedSurface::sphere_cover(3), sphere_grid(128, 0.05)),
        (WarpedSurface::flat_cylinder(4.0), Grid::new(0.0, 4.0, 128).unwrap()),
    ]
}

fn admitted(spin: SpinStructure, m: i32, period: f64) -> f64 {
    let offset = if spin == SpinStructure::Bounding { 0.5 } else { 0.0 };
    (m as f64 + offset) * TAU / period
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let spins = [SpinStructure::Bounding, SpinStructure::NonBounding];

    let mut symmetric = true;
    let mut floor_ok = true;
    let mut mirror = 0.0f64;
    let mut energy_min = f64::INFINITY;
    for (s, g) in property_surfaces() {
        for spin in spins {
            for m in 0..4 {
                let nu = admitted(spin, m, s.period);
                for op in [assemble_laplacian(&s, nu, &g).unwrap(), assemble_dirac_square(&s, spin, nu, &g).unwrap()] {
                    let d = op.stiffness.to_dense();
                    symmetric &= (0..d.len()).all(|i| (0..d.len()).all(|j| d[i][j].to_bits() == d[j][i].to_bits()));
                }
                let op = assemble_dirac_square(&s, spin, nu, &g).unwrap();
                floor_ok &= tridiag::sturm_count(&op.scaled(), SPECTRUM_FLOOR) == 0;
                let plus = smallest_eigenpairs(&op, 3).unwrap().eigenvalues;
                let minus =
                    smallest_eigenpairs(&assemble_dirac_square(&s, spin, -nu, &g).unwrap(), 3).unwrap().eigenvalues;
                for (a, b) in plus.iter().zip(&minus) {
                    mirror = mirror.max((a - b).abs() / a.abs().max(1.0));
                }
                if spin == SpinStructure::Bounding {
                    let phi = Section::spinor(&op, |t| [t.sin() + 0.3, (2.0 * t).cos()]).unwrap();
                    energy_min = energy_min.min(bochner_gradient_energy(&s, &op, &phi).unwrap());
                }
            }
        }
    }
    notes.push(format!("stiffness symmetric {symmetric}"));
    notes.push(format!("no D² eigenvalue below {SPECTRUM_FLOOR:e}: {floor_ok}"));
    notes.push(format!("ν ↔ −ν max {mirror:.1e}"));
    notes.push(format!("min Bochner energy {energy_min:.2e}"));

    let s = WarpedSurface::round_sphere();
    let h = 0.01;
    let spectra: Vec<Vec<f64>> = [100usize, 120, 140]
        .iter()
        .map(|&m| {
            let g = Grid::new(-(m as f64) * h, m as f64 * h, 2 * m).unwrap();
            smallest_eigenpairs(&assemble_dirac_square(&s, SpinStructure::Bounding, 0.5, &g).unwrap(), 3)
                .unwrap()
                .eigenvalues
        })
        .collect();
    let monotone = spectra.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(a, b)| a <= b));
    notes.push(format!("domain monotonicity {monotone}"));

    let defect = |n: usize| {
        let g = sphere_grid(n, 0.01);
        let op = assemble_dirac_square(&s, SpinStructure::Bounding, 0.5, &g).unwrap();
        let phi = smallest_eigenpairs(&op, 1).unwrap().eigenvectors.remove(0);
        let norm = phi.norm_sq(&op).sqrt();
        let v: Vec<f64> = phi.values().iter().map(|x| x / norm).collect();
        let phi = Section::new(SectionKind::Spinor, 0.5, g, v).unwrap();
        let lin = TestFunction::from_fn(&g, |t| (t, 1.0));
        leibniz_defect(&s, SpinStructure::Bounding, 0.5, &g, &lin, &phi).unwrap()
    };
    let d: Vec<f64> = [128, 256, 512].into_iter().map(defect).collect();
    let ratios = [d[0] / d[1], d[1] / d[2]];
    let leibniz = ratios.iter().all(|r| (LEIBNIZ_RATIO.0..=LEIBNIZ_RATIO.1).contains(r));
    notes.push(format!("Leibniz ratios {ratios:.3?}"));

    let mut slope = true;
    for rho in [0.5, 1.0, 2.0, 7.5] {
        let f = cutoff_function(rho, 0.0);
        let max = (0..=4000).map(|i| f(-4.0 * rho + 8.0 * rho * i as f64 / 4000.0).1.abs()).fold(0.0, f64::max);
        slope &= max <= 1.0 / rho;
    }
    notes.push(format!("cutoff slope audit {slope}"));

    let ok = symmetric
        && floor_ok
        && mirror <= MODE_SYMMETRY_TOL
        && monotone
        && leibniz
        && slope
        && energy_min >= BOCHNER_FLOOR;
    check(ok, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let r = run_scenario(&Scenario::growing_curvature().unwrap(), &PolicyOverrides::default()).unwrap();
    let essential = r.verdict(BoundName::Essential).unwrap();
    let probe = essential.probe.as_ref().unwrap();
    let stable = probe.stable && probe.windows.len() >= 3 && essential.verdict == Verdict::Holds;

    let half = WarpedSurface::new(
        0.0,
        f64::INFINITY,
        WarpFn::Constant { c: 1.0 },
        TAU,
        [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
    )
    .unwrap();
    let h = 0.05;
    let windows: Vec<Grid> =
        PROBE_LENGTHS.iter().map(|&l| Grid::new(0.0, l, (l / h).round() as usize).unwrap()).collect();
    let counts = truncation_probe(&half, FieldKind::Spinor(SpinStructure::NonBounding), &windows, PROBE_THRESHOLD)
        .unwrap()
        .counts;
    // Each π²j²/L² appears once in each of the two spinor components.
    let exact: Vec<usize> = PROBE_LENGTHS
        .iter()
        .map(|l| 2 * (1..).take_while(|&j| PI * PI * (j * j) as f64 / (l * l) < PROBE_THRESHOLD).count())
        .collect();
    let unbounded = counts == exact && counts.windows(2).all(|c| c[1] > c[0]);
    check(
        stable && unbounded,
        format!(
            "GrowingCurvature counts {:?} below {:.4}; half cylinder counts {counts:?}, closed form {exact:?}",
            probe.counts, probe.threshold
        ),
    )
}

fn criterion_8() -> Outcome {
    let config =
        RunConfig { scenario: "all".into(), overrides: PolicyOverrides::default(), format: Format::Json, out: None };
    let a = cmd_verify(&config).unwrap().to_json().unwrap();
    let b = cmd_verify(&config).unwrap().to_json().unwrap();
    check(a == b, format!("{} bytes, identical {}", a.len(), a == b))
}

fn catalog() -> Outcome {
    let config =
        RunConfig { scenario: "all".into(), overrides: PolicyOverrides::default(), format: Format::Json, out: None };
    let bundle = cmd_verify(&config).unwrap();
    let failed: Vec<&str> = bundle.reports.iter().filter(|r| !r.passed).map(|r| r.scenario_id.as_str()).collect();
    check(failed.is_empty(), format!("{} scenarios, failing {failed:?}", bundle.reports.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 round sphere Laplace tone", criterion_1),
        ("2 round sphere Dirac tone and Killing equality", criterion_2),
        ("3 M_k covers", criterion_3),
        ("4 nonbounding flat cylinder", criterion_4),
        ("5 bounding flat cylinder", criterion_5),
        ("6 property suite", criterion_6),
        ("7 truncation probes", criterion_7),
        ("8 determinism", criterion_8),
        ("catalog expectations", catalog),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let o = f();
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.passed);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
