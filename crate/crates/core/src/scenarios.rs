//! Built-in example geometries with their closed-form test sections and
//! expected verdicts, and loading of user scenario files in the same
//! schema.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundName, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{EndLabel, WarpFn, WarpedSurface};
use crate::operators::{assemble_dirac_square, assemble_laplacian, Grid, ReducedOperator, Section};
use crate::quadrature;
use crate::spin_fourier::SpinStructure;
use crate::spline::NaturalSpline;

pub const CATALOG_SCHEMA_VERSION: u32 = 1;

/// Tolerance on expected values unless a catalog entry sets its own.
pub const DEFAULT_VALUE_TOLERANCE: f64 = 1e-3;

/// Shipped copy of [`builtin_catalog`].
pub const CATALOG_JSON: &str = include_str!("../data/catalog.json");

/// A named closed-form section living in a single Fourier mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSection {
    /// Scalar `cos t · cos(φ/k)`: mode `1/k`.
    CosineMode { k: u32 },
    /// Spinor `sin(π(t − start)/length)` on `[start, start + length]`, zero
    /// elsewhere, in the first component of the lowest nonnegative spinor
    /// mode (`0` non-bounding, `π/P` bounding).
    DirichletSine { start: f64, length: f64 },
}

impl TestSection {
    pub fn mode(&self, spin: Option<SpinStructure>, period: f64) -> f64 {
        match (self, spin) {
            (TestSection::CosineMode { k }, _) => 1.0 / *k as f64,
            (TestSection::DirichletSine { .. }, Some(SpinStructure::Bounding)) => PI / period,
            (TestSection::DirichletSine { .. }, _) => 0.0,
        }
    }

    pub fn profile(&self, t: f64) -> f64 {
        match *self {
            TestSection::CosineMode { .. } => t.cos(),
            TestSection::DirichletSine { start, length } => {
                let x = (t - start) / length;
                if (0.0..=1.0).contains(&x) {
                    (PI * x).sin()
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫₀^P |e^{iνφ}|² dφ = P` for spinors; `∫₀^P cos²(νφ) dφ` for the
    /// real scalar section.
    fn angular_norm(&self, spin: Option<SpinStructure>, period: f64) -> f64 {
        let nu = self.mode(spin, period);
        if matches!(self, TestSection::DirichletSine { .. }) {
            return period;
        }
        if nu == 0.0 {
            period
        } else {
            quadrature::integrate(|p| (nu * p).cos().powi(2), 0.0, period, 1e-14)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticSource {
    /// The computed fundamental tone of the bound's operator.
    #[default]
    Tone,
    /// The Rayleigh quotient of a named test section.
    TestSection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceTag {
    PublishedExample,
    ClosedForm,
    DerivedOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub bound: BoundName,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub provenance: ProvenanceTag,
    #[serde(default)]
    pub statistic: StatisticSource,
}

fn default_tolerance() -> f64 {
    DEFAULT_VALUE_TOLERANCE
}

/// Per-scenario grid settings; unset fields fall back to the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_field: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_factor: Option<f64>,
    /// Width of the end windows used for the curvature bound at infinity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_width: Option<f64>,
}

impl PolicyOverrides {
    /// Fields set in `top` win over fields set in `self`.
    pub fn layered(&self, top: &PolicyOverrides) -> PolicyOverrides {
        PolicyOverrides {
            intervals: top.intervals.or(self.intervals),
            pole_offset: top.pole_offset.or(self.pole_offset),
            far_field: top.far_field.or(self.far_field),
            mode_cutoff: top.mode_cutoff.or(self.mode_cutoff),
            tol_factor: top.tol_factor.or(self.tol_factor),
            tail_width: top.tail_width.or(self.tail_width),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub description: String,
    pub surface: WarpedSurface,
    /// `None` for scalar-only scenarios.
    pub spin: Option<SpinStructure>,
    #[serde(default)]
    pub test_sections: BTreeMap<String, TestSection>,
    #[serde(default)]
    pub expected: Vec<Expected>,
    #[serde(default)]
    pub policy: PolicyOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogDocument {
    pub schema_version: u32,
    pub scenarios: Vec<Scenario>,
}

fn expect(bound: BoundName, verdict: Verdict, value: Option<f64>, provenance: ProvenanceTag) -> Expected {
    Expected { bound, verdict, value, tolerance: DEFAULT_VALUE_TOLERANCE, provenance, statistic: StatisticSource::Tone }
}

impl Expected {
    fn via(mut self, section: &str) -> Self {
        self.statistic = StatisticSource::TestSection(section.to_string());
        self
    }
}

/// `2 − (3/2)(1 − k⁻²)`: Rayleigh quotient of `f_k` on `M_k`.
pub fn cover_quotient(k: u32) -> f64 {
    let k = k as f64;
    2.0 - 1.5 * (1.0 - 1.0 / (k * k))
}

impl Scenario {
    /// The k-fold cover `M_k` of the punctured round sphere with test
    /// function `f_k`; `k = 1` is the round sphere itself.
    pub fn cover(k: u32) -> Result<Scenario> {
        use BoundName::*;
        use ProvenanceTag::*;
        use Verdict::*;
        if k == 0 {
            return Err(Error::arg("cover index k must be at least 1"));
        }
        let q = cover_quotient(k);
        let mut expected = vec![
            expect(Friedrich, Holds, (k == 1).then_some(1.0), if k == 1 { DerivedOracle } else { PublishedExample }),
            expect(Baer, Holds, (k == 1).then_some(1.0), DerivedOracle),
            expect(Essential, Holds, None, PublishedExample),
        ];
        if k == 1 {
            expected.push(expect(Lichnerowicz, Holds, Some(2.0), PublishedExample));
        } else {
            expected.push(expect(Lichnerowicz, ViolatedAsPredicted, Some(q), PublishedExample).via("f_k"));
        }
        let (id, description) = if k == 1 {
            (
                "RoundSphere".to_string(),
                "Round unit sphere minus its poles; both spinor bounds are attained.".to_string(),
            )
        } else {
            (
                format!("CoverMk-{k}"),
                format!(
                    "{k}-fold cover of the punctured round sphere; incomplete at two cone points of angle {}π.",
                    2 * k
                ),
            )
        };
        Ok(Scenario {
            id,
            description,
            surface: WarpedSurface::sphere_cover(k),
            spin: Some(SpinStructure::Bounding),
            test_sections: BTreeMap::from([("f_k".to_string(), TestSection::CosineMode { k })]),
            expected,
            policy: PolicyOverrides::default(),
        })
    }

    /// Flat cylinder `(0, L) × S¹` with the given spin structure.
    pub fn flat_cylinder(length: f64, spin: SpinStructure) -> Result<Scenario> {
        use BoundName::*;
        use ProvenanceTag::*;
        use Verdict::*;
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::arg(format!("cylinder length must be positive, got {length}")));
        }
        let base = PI * PI / (length * length);
        let mut expected =
            vec![expect(Friedrich, Inapplicable, None, ClosedForm), expect(Essential, Inapplicable, None, ClosedForm)];
        let (label, baer) = match spin {
            SpinStructure::Bounding => ("bounding", expect(Baer, Holds, Some(0.25 + base), ClosedForm)),
            SpinStructure::NonBounding => {
                let below = base < 2.0 / length;
                let v = if below { ViolatedAsPredicted } else { Inapplicable };
                ("nonbounding", expect(Baer, v, Some(base), PublishedExample))
            }
        };
        expected.push(baer);
        Ok(Scenario {
            id: format!("FlatCylinder-L{}-{label}", fmt_param(length)),
            description: format!(
                "Flat cylinder (0, {length}) × S¹ of circumference 2π with the {label} spin structure; Dirichlet at both boundary circles."
            ),
            surface: WarpedSurface::flat_cylinder(length),
            spin: Some(spin),
            test_sections: BTreeMap::from([(
                "dirichlet_sine".to_string(),
                TestSection::DirichletSine { start: 0.0, length },
            )]),
            expected,
            policy: PolicyOverrides::default(),
        })
    }

    /// Flat cylinder of length `L` and radius 1 with an exponential cusp of
    /// area `A` glued to each end, non-bounding spin structure.
    pub fn cusp_cylinder(length: f64, cusp_area: f64) -> Result<Scenario> {
        use BoundName::*;
        use ProvenanceTag::*;
        use Verdict::*;
        let a = cusp_area / TAU;
        let surface = WarpedSurface::new(
            f64::NEG_INFINITY,
            f64::INFINITY,
            WarpFn::CuspedCylinder { length, radius: 1.0, cusp_scale: a },
            TAU,
            [EndLabel::CuspComplete; 2],
        )?;
        let base = PI * PI / (length * length);
        let baer_value = 4.0 * PI / (TAU * length + 2.0 * cusp_area);
        let verdict = if base < baer_value { ViolatedAsPredicted } else { Inapplicable };
        Ok(Scenario {
            id: format!("CuspCylinder-L{}", fmt_param(length)),
            description: format!(
                "Cylinder of length {length} with cusps of area {cusp_area} on both ends (complete, finite area), non-bounding spin structure. \
                 The zero-extended sine has a kink at each junction but lies in the domain of the closed quadratic form, \
                 so its quotient π²/L² bounds the fundamental tone from above."
            ),
            surface,
            spin: Some(SpinStructure::NonBounding),
            test_sections: BTreeMap::from([(
                "dirichlet_sine".to_string(),
                TestSection::DirichletSine { start: 0.0, length },
            )]),
            expected: vec![
                expect(Baer, verdict, Some(base), PublishedExample).via("dirichlet_sine"),
                expect(Friedrich, Inapplicable, None, ClosedForm),
                expect(Essential, Inapplicable, None, ClosedForm),
            ],
            policy: PolicyOverrides {
                // Cusp area beyond the cut is 1e-6 of A.
                far_field: Some(a * 1e6_f64.ln()),
                ..Default::default()
            },
        })
    }

    /// Rotationally symmetric cap with `f'' = −(1 + t²) f`, `f(0) = 1`,
    /// `f'(0) = 0`, cut at the first zeros `±t_z`.
    pub fn growing_curvature() -> Result<Scenario> {
        use BoundName::*;
        use ProvenanceTag::*;
        use Verdict::*;
        let (spline, tz) = growing_curvature_warp()?;
        Ok(Scenario {
            id: "GrowingCurvature".to_string(),
            description: format!(
                "Tabulated warp with Gauss curvature 1 + t² on (−{tz:.6}, {tz:.6}); both ends are non-removable cone points."
            ),
            surface: WarpedSurface::new(
                -tz,
                tz,
                WarpFn::Tabulated { spline },
                TAU,
                [EndLabel::IncompleteBoundary; 2],
            )?,
            spin: Some(SpinStructure::Bounding),
            test_sections: BTreeMap::new(),
            expected: vec![
                expect(Friedrich, Holds, None, DerivedOracle),
                expect(Baer, Holds, None, DerivedOracle),
                expect(Essential, Holds, None, DerivedOracle),
            ],
            policy: PolicyOverrides::default(),
        })
    }

    pub fn test_section(&self, name: &str) -> Result<&TestSection> {
        self.test_sections
            .get(name)
            .ok_or_else(|| Error::Catalog(format!("scenario {} has no test section {name:?}", self.id)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)?)
    }
}

fn fmt_param(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Integration step for the growing-curvature warp.
const ODE_STEP: f64 = 1e-4;
/// Every this many steps becomes a spline knot.
const KNOT_STRIDE: usize = 50;

fn growing_curvature_warp() -> Result<(NaturalSpline, f64)> {
    let rhs = |t: f64, y: [f64; 2]| [y[1], -(1.0 + t * t) * y[0]];
    let h = ODE_STEP;
    let (mut t, mut y) = (0.0_f64, [1.0_f64, 0.0]);
    let mut half = vec![(0.0, 1.0)];
    let mut step = 0;
    let tz = loop {
        let k1 = rhs(t, y);
        let k2 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] <= 0.0 {
            // Newton step from the last positive sample.
            break t - y[0] / y[1];
        }
        t += h;
        y = next;
        step += 1;
        if step % KNOT_STRIDE == 0 {
            half.push((t, y[0]));
        }
        if t > 10.0 {
            return Err(Error::Assembly("growing-curvature warp has no zero".into()));
        }
    };
    if tz - half.last().unwrap().0 < 0.5 * KNOT_STRIDE as f64 * h {
        half.pop();
    }
    half.push((tz, 0.0));
    let mut ts: Vec<f64> = half.iter().rev().map(|p| -p.0).collect();
    let mut fs: Vec<f64> = half.iter().rev().map(|p| p.1).collect();
    ts.pop();
    fs.pop();
    ts.extend(half.iter().map(|p| p.0));
    fs.extend(half.iter().map(|p| p.1));
    Ok((NaturalSpline::new(ts, fs)?, tz))
}

/// RoundSphere, CoverMk-{2,3,5}, FlatCylinder-L{2,5,10}-{bounding,nonbounding},
/// CuspCylinder-L10 and GrowingCurvature.
pub fn builtin_catalog() -> Vec<Scenario> {
    let mut out = Vec::new();
    for k in [1, 2, 3, 5] {
        out.push(Scenario::cover(k).expect("valid k"));
    }
    for l in [2.0, 5.0, 10.0] {
        for spin in [SpinStructure::Bounding, SpinStructure::NonBounding] {
            out.push(Scenario::flat_cylinder(l, spin).expect("valid length"));
        }
    }
    out.push(Scenario::cusp_cylinder(10.0, PI).expect("valid cusp"));
    out.push(Scenario::growing_curvature().expect("warp integrates"));
    out
}

pub fn catalog_document(scenarios: Vec<Scenario>) -> CatalogDocument {
    CatalogDocument { schema_version: CATALOG_SCHEMA_VERSION, scenarios }
}

pub fn catalog_to_json(doc: &CatalogDocument) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&serde_json::to_value(doc)?)?;
    s.push('\n');
    Ok(s)
}

/// Parses either a catalog document or a single scenario.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let scenarios = if v.get("scenarios").is_some() {
        let found = v.get("schema_version").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
        if found != CATALOG_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found, expected: CATALOG_SCHEMA_VERSION });
        }
        serde_json::from_value::<CatalogDocument>(v)?.scenarios
    } else {
        vec![serde_json::from_value::<Scenario>(v)?]
    };
    let mut seen = std::collections::BTreeSet::new();
    for s in &scenarios {
        s.surface.validate()?;
        if !seen.insert(s.id.clone()) {
            return Err(Error::Catalog(format!("duplicate scenario id {:?}", s.id)));
        }
    }
    Ok(scenarios)
}

/// `all`, a built-in id (case-insensitive), or a path to a JSON file.
pub fn resolve(selector: &str) -> Result<Vec<Scenario>> {
    if selector.eq_ignore_ascii_case("all") {
        return Ok(builtin_catalog());
    }
    if let Some(s) = builtin_catalog().into_iter().find(|s| s.id.eq_ignore_ascii_case(selector)) {
        return Ok(vec![s]);
    }
    let path = Path::new(selector);
    if path.is_file() {
        return parse_scenarios(&std::fs::read_to_string(path)?);
    }
    Err(Error::Catalog(format!("no built-in scenario or file named {selector:?}")))
}

/// Operator matching a test section's field and mode on `grid`, and the
/// section sampled on it.
pub fn eval_test_section(scenario: &Scenario, name: &str, grid: &Grid) -> Result<(ReducedOperator, Section)> {
    let ts = scenario.test_section(name)?;
    match ts {
        TestSection::CosineMode { .. } => {
            let op = assemble_laplacian(&scenario.surface, ts.mode(None, scenario.surface.period), grid)?;
            let s = Section::scalar(&op, |t| ts.profile(t))?;
            Ok((op, s))
        }
        TestSection::DirichletSine { .. } => {
            let spin = scenario.spin.unwrap_or(SpinStructure::NonBounding);
            let op =
                assemble_dirac_square(&scenario.surface, spin, ts.mode(Some(spin), scenario.surface.period), grid)?;
            let s = Section::spinor(&op, |t| [ts.profile(t), 0.0])?;
            Ok((op, s))
        }
    }
}

fn radial_window(scenario: &Scenario, ts: &TestSection) -> (f64, f64) {
    match *ts {
        TestSection::CosineMode { .. } => {
            (scenario.surface.t_min.max(-FRAC_PI_2), scenario.surface.t_max.min(FRAC_PI_2))
        }
        TestSection::DirichletSine { start, length } => (start, start + length),
    }
}

/// `‖s‖²` over the whole surface by adaptive quadrature.
pub fn test_section_norm_sq(scenario: &Scenario, name: &str) -> Result<f64> {
    let ts = scenario.test_section(name)?;
    let (a, b) = radial_window(scenario, ts);
    let warp = &scenario.surface.warp;
    let radial = quadrature::integrate(|t| warp.value(t) * ts.profile(t).powi(2), a, b, 1e-14);
    Ok(radial * ts.angular_norm(scenario.spin, scenario.surface.period))
}

/// `|∫ s · 1 dA|`: overlap of a test section with the constants.
pub fn mk_orthogonality(scenario: &Scenario, name: &str) -> Result<f64> {
    let ts = scenario.test_section(name)?;
    let (a, b) = radial_window(scenario, ts);
    let warp = &scenario.surface.warp;
    let radial = quadrature::integrate(|t| warp.value(t) * ts.profile(t), a, b, 1e-14);
    let nu = ts.mode(scenario.spin, scenario.surface.period);
    let angular = quadrature::integrate(|p| (nu * p).cos(), 0.0, scenario.surface.period, 1e-15);
    Ok((radial * angular).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::rayleigh_quotient;

    #[test]
    fn catalog_matches_shipped_file() {
        let doc = catalog_document(builtin_catalog());
        let text = catalog_to_json(&doc).unwrap();
        assert_eq!(parse_scenarios(&text).unwrap(), doc.scenarios);
        assert_eq!(parse_scenarios(CATALOG_JSON).unwrap(), doc.scenarios);
    }

    #[test]
    fn ids_are_unique_and_resolvable() {
        let cat = builtin_catalog();
        assert!(cat.len() >= 12);
        for s in &cat {
            assert_eq!(resolve(&s.id.to_lowercase()).unwrap()[0].id, s.id);
        }
        assert!(matches!(resolve("no-such-id"), Err(Error::Catalog(_))));
        assert_eq!(resolve("all").unwrap().len(), cat.len());
    }

    #[test]
    fn cover_norms_and_orthogonality() {
        for k in [1, 2, 3, 5] {
            let s = Scenario::cover(k).unwrap();
            let n = test_section_norm_sq(&s, "f_k").unwrap();
            assert!((n - 4.0 * k as f64 * PI / 3.0).abs() < 1e-9, "k = {k}: {n}");
            assert!(mk_orthogonality(&s, "f_k").unwrap() <= 1e-12);
        }
    }

    #[test]
    fn test_section_samples() {
        let s = Scenario::cover(2).unwrap();
        let g = Grid::new(-FRAC_PI_2 + 1e-3, FRAC_PI_2 - 1e-3, 64).unwrap();
        let (op, sec) = eval_test_section(&s, "f_k", &g).unwrap();
        assert_eq!(sec.mode(), 0.5);
        assert_eq!(sec.values()[3], op.unknown_nodes()[3].cos());
        assert!(matches!(eval_test_section(&s, "nope", &g), Err(Error::Catalog(_))));

        let c = Scenario::flat_cylinder(5.0, SpinStructure::NonBounding).unwrap();
        let g = Grid::new(0.0, 5.0, 512).unwrap();
        let (op, sec) = eval_test_section(&c, "dirichlet_sine", &g).unwrap();
        assert_eq!(sec.mode(), 0.0);
        let q = rayleigh_quotient(&op, &sec).unwrap();
        assert!((q - PI * PI / 25.0).abs() < 1e-5);

        let c = Scenario::flat_cylinder(5.0, SpinStructure::Bounding).unwrap();
        let (op, sec) = eval_test_section(&c, "dirichlet_sine", &g).unwrap();
        assert_eq!(sec.mode(), 0.5);
        let q = rayleigh_quotient(&op, &sec).unwrap();
        assert!((q - 0.25 - PI * PI / 25.0).abs() < 1e-5);
    }

    #[test]
    fn cylinder_expectations_follow_the_crossover() {
        let verdict = |l: f64| {
            Scenario::flat_cylinder(l, SpinStructure::NonBounding)
                .unwrap()
                .expected
                .into_iter()
                .find(|e| e.bound == BoundName::Baer)
                .unwrap()
                .verdict
        };
        assert_eq!(verdict(2.0), Verdict::Inapplicable);
        assert_eq!(verdict(4.9), Verdict::Inapplicable);
        assert_eq!(verdict(5.0), Verdict::ViolatedAsPredicted);
        assert_eq!(verdict(10.0), Verdict::ViolatedAsPredicted);
    }

    #[test]
    fn growing_curvature_profile() {
        let s = Scenario::growing_curvature().unwrap();
        for t in [0.0, 0.5, 1.0] {
            let k = crate::geometry::gauss_curvature(&s.surface, t).unwrap();
            assert!((k - (1.0 + t * t)).abs() < 1e-4, "K({t}) = {k}");
        }
        assert!(s.surface.ends().iter().all(|e| matches!(e, crate::geometry::EndKind::ConePoint { .. })));
        assert!(!s.surface.closes_up());
    }

    #[test]
    fn user_scenario_file() {
        let s = Scenario::flat_cylinder(3.0, SpinStructure::Bounding).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        std::fs::write(&p, s.to_json().unwrap()).unwrap();
        assert_eq!(resolve(p.to_str().unwrap()).unwrap(), vec![s.clone()]);
        let doc = catalog_document(vec![s.clone(), s]);
        assert!(matches!(parse_scenarios(&catalog_to_json(&doc).unwrap()), Err(Error::Catalog(_))));
    }
}
