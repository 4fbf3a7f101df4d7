//! Warped-product surfaces `dt² + f(t)² dφ²` over `(t_min, t_max) × ℝ/Pℤ`.
//!
//! Everything here is closed-form or spline-backed and immutable after
//! construction. Curvature conventions: Gauss curvature `K = -f''/f`,
//! scalar curvature `scal = 2K`, and the spinor curvature endomorphism is
//! `scal / 4`. On a surface `Ric = K g`, so the one-form curvature bound is
//! `inf K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Grid;
use crate::quadrature;
use crate::spline::NaturalSpline;

pub const SURFACE_SCHEMA_VERSION: u32 = 1;

/// Profile function `f` of the warped metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarpFn {
    /// `f(t) = cos t`, the round sphere in latitude coordinates.
    Cosine,
    /// `f(t) = c`.
    Constant { c: f64 },
    /// `f(t) = c e^{-t}`, a hyperbolic cusp (`K ≡ -1`).
    ExpCusp { c: f64 },
    /// A cylinder of radius `radius` on `[0, length]` with exponential cusps
    /// `radius · e^{-s/cusp_scale}` glued on at both ends (`s` = distance
    /// past the junction). Derivatives are one-sided at the junctions.
    CuspedCylinder { length: f64, radius: f64, cusp_scale: f64 },
    /// Natural cubic spline through sampled values.
    Tabulated { spline: NaturalSpline },
}

impl WarpFn {
    /// `(f, f', f'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            WarpFn::Cosine => (t.cos(), -t.sin(), -t.cos()),
            WarpFn::Constant { c } => (*c, 0.0, 0.0),
            WarpFn::ExpCusp { c } => {
                let v = c * (-t).exp();
                (v, -v, v)
            }
            WarpFn::CuspedCylinder { length, radius, cusp_scale } => {
                let a = *cusp_scale;
                if t > *length {
                    let v = radius * (-(t - length) / a).exp();
                    (v, -v / a, v / (a * a))
                } else if t < 0.0 {
                    let v = radius * (t / a).exp();
                    (v, v / a, v / (a * a))
                } else {
                    (*radius, 0.0, 0.0)
                }
            }
            WarpFn::Tabulated { spline } => spline.eval(t),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }

    /// Points where the warp is only piecewise smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            WarpFn::CuspedCylinder { length, .. } => vec![0.0, *length],
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::arg(format!("warp parameter {name} must be positive and finite, got {v}")))
            }
        };
        match self {
            WarpFn::Cosine => Ok(()),
            WarpFn::Constant { c } | WarpFn::ExpCusp { c } => positive("c", *c),
            WarpFn::CuspedCylinder { length, radius, cusp_scale } => {
                positive("length", *length)?;
                positive("radius", *radius)?;
                positive("cusp_scale", *cusp_scale)
            }
            WarpFn::Tabulated { .. } => Ok(()),
        }
    }
}

/// How an end of the parameter interval is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndLabel {
    IncompleteBoundary,
    CuspComplete,
}

/// Geometric nature of an end, derived from the warp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum EndKind {
    /// Finite parameter, `f > 0` in the limit: a boundary circle.
    Boundary,
    /// Finite parameter, `f → 0`: a cone point with the given total angle.
    /// Angle `2π` means the point is removable (smooth pole).
    ConePoint { cone_angle: f64 },
    /// Infinite parameter.
    Infinite,
}

impl EndKind {
    pub fn is_removable(&self) -> bool {
        matches!(self, EndKind::ConePoint { cone_angle } if (cone_angle - std::f64::consts::TAU).abs() < 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedSurface {
    #[serde(with = "extended_real")]
    pub t_min: f64,
    #[serde(with = "extended_real")]
    pub t_max: f64,
    pub warp: WarpFn,
    /// Circle period `P`; `2kπ` for the k-fold cover of the round sphere.
    pub period: f64,
    pub end_labels: [EndLabel; 2],
}

/// Reals with `±∞` written as the strings `"inf"` and `"-inf"`.
pub mod extended_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *x {
            f64::INFINITY => s.serialize_str("inf"),
            f64::NEG_INFINITY => s.serialize_str("-inf"),
            v => s.serialize_f64(v),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("expected a number, \"inf\" or \"-inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SurfaceDocument {
    schema_version: u32,
    #[serde(flatten)]
    surface: WarpedSurface,
}

const DEGENERATE_WARP: f64 = 1e-12;

impl WarpedSurface {
    pub fn new(t_min: f64, t_max: f64, warp: WarpFn, period: f64, end_labels: [EndLabel; 2]) -> Result<Self> {
        let s = WarpedSurface { t_min, t_max, warp, period, end_labels };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if t_order_invalid(self.t_min, self.t_max) {
            return Err(Error::arg(format!("need t_min < t_max, got ({}, {})", self.t_min, self.t_max)));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::arg(format!("circle period must be positive, got {}", self.period)));
        }
        self.warp.validate()?;
        if let WarpFn::Tabulated { spline } = &self.warp {
            let (lo, hi) = spline.range();
            if self.t_min < lo || self.t_max > hi {
                return Err(Error::arg("tabulated warp does not cover the surface interval"));
            }
        }
        Ok(())
    }

    /// Round sphere minus its poles, `P = 2π`.
    pub fn round_sphere() -> Self {
        Self::sphere_cover(1)
    }

    /// The k-fold cover `M_k` of the punctured round sphere.
    pub fn sphere_cover(k: u32) -> Self {
        let h = std::f64::consts::FRAC_PI_2;
        WarpedSurface {
            t_min: -h,
            t_max: h,
            warp: WarpFn::Cosine,
            period: std::f64::consts::TAU * k as f64,
            end_labels: [EndLabel::IncompleteBoundary; 2],
        }
    }

    /// Flat cylinder `(0, length) × S¹` of circumference `2π`.
    pub fn flat_cylinder(length: f64) -> Self {
        WarpedSurface {
            t_min: 0.0,
            t_max: length,
            warp: WarpFn::Constant { c: 1.0 },
            period: std::f64::consts::TAU,
            end_labels: [EndLabel::IncompleteBoundary; 2],
        }
    }

    /// Checks `t` against the open interval.
    pub fn check(&self, t: f64) -> Result<()> {
        if t > self.t_min && t < self.t_max {
            Ok(())
        } else {
            Err(Error::Domain { t, t_min: self.t_min, t_max: self.t_max })
        }
    }

    /// Like [`check`](Self::check) but admits finite endpoints where the
    /// warp stays positive (Dirichlet boundary circles).
    pub fn check_closed(&self, t: f64) -> Result<()> {
        let at_regular_end =
            (t == self.t_min || t == self.t_max) && t.is_finite() && self.warp.value(t) > DEGENERATE_WARP;
        if at_regular_end {
            Ok(())
        } else {
            self.check(t)
        }
    }

    pub fn warp_at(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_closed(t)?;
        Ok(self.warp.eval(t))
    }

    /// Classifies the lower (`upper = false`) or upper end.
    pub fn end_kind(&self, upper: bool) -> EndKind {
        let t = if upper { self.t_max } else { self.t_min };
        if !t.is_finite() {
            return EndKind::Infinite;
        }
        let (f, df, _) = self.warp.eval(t);
        if f.abs() <= DEGENERATE_WARP {
            EndKind::ConePoint { cone_angle: self.period * df.abs() }
        } else {
            EndKind::Boundary
        }
    }

    pub fn ends(&self) -> [EndKind; 2] {
        [self.end_kind(false), self.end_kind(true)]
    }

    /// Every end is a smooth pole: the surface is a closed sphere with two
    /// points removed.
    pub fn closes_up(&self) -> bool {
        self.ends().iter().all(EndKind::is_removable)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SurfaceDocument { schema_version: SURFACE_SCHEMA_VERSION, surface: self.clone() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurfaceDocument = serde_json::from_str(text)?;
        if doc.schema_version != SURFACE_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: doc.schema_version, expected: SURFACE_SCHEMA_VERSION });
        }
        doc.surface.validate()?;
        Ok(doc.surface)
    }
}

fn t_order_invalid(a: f64, b: f64) -> bool {
    a.is_nan() || b.is_nan() || a >= b
}

/// `K(t) = -f''(t)/f(t)`.
pub fn gauss_curvature(surface: &WarpedSurface, t: f64) -> Result<f64> {
    surface.check(t)?;
    let (f, _, d2) = surface.warp.eval(t);
    Ok(-d2 / f)
}

/// Integrand tolerance used for area; relative.
const AREA_TOL: f64 = 1e-13;

/// `P · ∫ f dt` over the surface interval.
///
/// Infinite ends are integrated chunk-wise with a tail estimate; a
/// non-decaying tail is reported as [`Error::InfiniteArea`].
pub fn area(surface: &WarpedSurface) -> Result<f64> {
    let f = |t: f64| surface.warp.value(t);
    let (lo, hi) = (surface.t_min, surface.t_max);
    let mut cuts: Vec<f64> = surface.warp.breakpoints().into_iter().filter(|&b| b > lo && b < hi).collect();
    if let WarpFn::Tabulated { spline } = &surface.warp {
        cuts.extend(spline.knots().iter().copied().filter(|&b| b > lo && b < hi));
    }
    // Finite core interval, with infinite tails handled separately.
    let core_lo = if lo.is_finite() { lo } else { cuts.first().copied().unwrap_or(0.0).min(hi) };
    let core_hi = if hi.is_finite() { hi } else { cuts.last().copied().unwrap_or(0.0).max(core_lo) };
    let mut pts = vec![core_lo];
    pts.extend(cuts.iter().copied().filter(|&c| c > core_lo && c < core_hi));
    pts.push(core_hi);
    let scale = pts.iter().map(|&t| f(t).abs()).fold(0.0, f64::max).max(1e-300);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += quadrature::integrate(f, w[0], w[1], AREA_TOL * scale * (w[1] - w[0]).abs().max(1.0));
    }
    if !hi.is_finite() {
        total += quadrature::integrate_to_infinity(f, core_hi, AREA_TOL)?;
    }
    if !lo.is_finite() {
        total += quadrature::integrate_to_infinity(|s| f(core_lo - s), 0.0, AREA_TOL)?;
    }
    let a = surface.period * total;
    if a.is_finite() {
        Ok(a)
    } else {
        Err(Error::InfiniteArea)
    }
}

/// Curvature sampled on a grid plus the lower bounds used by the bound checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub nodes: Vec<f64>,
    pub gauss: Vec<f64>,
    pub scal: Vec<f64>,
    /// `inf scal / 4`, the spinor curvature endomorphism bound.
    pub kappa_spinor: f64,
    /// `inf K`, the Ricci lower bound on one-forms.
    pub kappa_oneform: f64,
    /// `kappa_spinor > 0`.
    pub positive_curvature: bool,
    /// `scal/4` grows without bound toward at least one end.
    pub curvature_blows_up: bool,
}

pub fn curvature_profile(surface: &WarpedSurface, grid: &Grid) -> Result<CurvatureProfile> {
    let nodes: Vec<f64> = grid.nodes().collect();
    let mut gauss = Vec::with_capacity(nodes.len());
    for &t in &nodes {
        surface.check_closed(t)?;
        let (f, _, d2) = surface.warp.eval(t);
        if f <= 0.0 {
            return Err(Error::Domain { t, t_min: surface.t_min, t_max: surface.t_max });
        }
        gauss.push(-d2 / f);
    }
    let scal: Vec<f64> = gauss.iter().map(|k| 2.0 * k).collect();

    // Breakpoints of piecewise warps are where monotone pieces meet; probe
    // both sides of each one inside the grid span.
    let mut extra = Vec::new();
    for b in surface.warp.breakpoints() {
        if b > grid.start() && b < grid.end() {
            for t in [b - 1e-12, b + 1e-12] {
                let (f, _, d2) = surface.warp.eval(t);
                extra.push(-d2 / f);
            }
        }
    }
    let kappa_oneform = gauss.iter().chain(extra.iter()).copied().fold(f64::INFINITY, f64::min);
    let kappa_spinor = kappa_oneform / 2.0;
    Ok(CurvatureProfile {
        nodes,
        gauss,
        scal,
        kappa_spinor,
        kappa_oneform,
        positive_curvature: kappa_spinor > 0.0,
        curvature_blows_up: curvature_blows_up(surface),
    })
}

/// Samples `scal/4` on a geometric approach to each end and reports
/// whether it keeps growing past a large threshold.
pub fn curvature_blows_up(surface: &WarpedSurface) -> bool {
    const THRESHOLD: f64 = 1e6;
    [false, true].iter().any(|&upper| {
        let samples: Vec<f64> = (1..=12)
            .filter_map(|j| {
                let d = 10f64.powi(-j);
                let t = match (upper, surface.t_max.is_finite(), surface.t_min.is_finite()) {
                    (true, true, _) => surface.t_max - d,
                    (true, false, _) => 10f64.powi(j),
                    (false, _, true) => surface.t_min + d,
                    (false, _, false) => -(10f64.powi(j)),
                };
                gauss_curvature(surface, t).ok().filter(|k| k.is_finite()).map(|k| k / 2.0)
            })
            .collect();
        samples.len() >= 4
            && samples.windows(2).all(|w| w[1] >= w[0])
            && samples.last().copied().unwrap_or(0.0) > THRESHOLD
    })
}

/// Distance past the finite core at which infinite ends are sampled.
const TAIL_OFFSET: f64 = 20.0;

/// Infimum of `scal/4` over the outermost `width` of every non-removable
/// end; the finite stand-in for `liminf_{x→∞} 𝒦`.
///
/// Returns `None` when every end is a removable pole.
pub fn kappa_at_infinity(surface: &WarpedSurface, width: f64) -> Option<f64> {
    let mut inf: Option<f64> = None;
    for (upper, kind) in [(false, surface.end_kind(false)), (true, surface.end_kind(true))] {
        if kind.is_removable() {
            continue;
        }
        let breaks = surface.warp.breakpoints();
        let core_lo = breaks.first().copied().unwrap_or(0.0);
        let core_hi = breaks.last().copied().unwrap_or(0.0);
        let (a, b) = match (upper, kind) {
            (false, EndKind::Infinite) => (core_lo - TAIL_OFFSET - width, core_lo - TAIL_OFFSET),
            (true, EndKind::Infinite) => (core_hi + TAIL_OFFSET, core_hi + TAIL_OFFSET + width),
            (false, _) => (surface.t_min, surface.t_min + width),
            (true, _) => (surface.t_max - width, surface.t_max),
        };
        let m = 64;
        let local = (1..m)
            .map(|i| a + (b - a) * i as f64 / m as f64)
            .filter_map(|t| gauss_curvature(surface, t).ok())
            .filter(|k| k.is_finite())
            .map(|k| k / 2.0)
            .fold(f64::INFINITY, f64::min);
        inf = Some(inf.map_or(local, |v: f64| v.min(local)));
    }
    inf
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn cosine_curvature_is_one() {
        let s = WarpedSurface::round_sphere();
        assert_eq!(gauss_curvature(&s, 0.3).unwrap(), 1.0);
        for i in 1..50 {
            let t = -FRAC_PI_2 + PI * i as f64 / 50.0;
            assert!((gauss_curvature(&s, t).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_and_cusp_curvature() {
        let c = WarpedSurface::flat_cylinder(3.0);
        assert_eq!(gauss_curvature(&c, 1.7).unwrap(), 0.0);
        let cusp = WarpedSurface::new(
            0.0,
            f64::INFINITY,
            WarpFn::ExpCusp { c: 1.0 },
            TAU,
            [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
        )
        .unwrap();
        // Symbolic: (e^{-t})'' = e^{-t}, so K = -1.
        assert!((gauss_curvature(&cusp, 1.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn outside_interval_is_domain_error() {
        let s = WarpedSurface::round_sphere();
        assert!(matches!(gauss_curvature(&s, 2.0), Err(Error::Domain { .. })));
        assert!(matches!(gauss_curvature(&s, FRAC_PI_2), Err(Error::Domain { .. })));
    }

    #[test]
    fn areas_match_antiderivatives() {
        let a1 = area(&WarpedSurface::round_sphere()).unwrap();
        assert!((a1 - 4.0 * PI).abs() < 1e-10 * 4.0 * PI);
        for k in [2u32, 3, 5] {
            let ak = area(&WarpedSurface::sphere_cover(k)).unwrap();
            assert!((ak - k as f64 * a1).abs() < 1e-10 * ak);
        }
        let cyl = area(&WarpedSurface::flat_cylinder(5.0)).unwrap();
        assert!((cyl - 10.0 * PI).abs() < 1e-10 * cyl);
    }

    #[test]
    fn cusp_areas() {
        let cusp = WarpedSurface::new(
            0.0,
            f64::INFINITY,
            WarpFn::ExpCusp { c: 0.5 },
            TAU,
            [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
        )
        .unwrap();
        assert!((area(&cusp).unwrap() - PI).abs() < 1e-10);

        let a = 0.5; // each cusp has area 2π·a = π
        let cc = WarpedSurface::new(
            f64::NEG_INFINITY,
            f64::INFINITY,
            WarpFn::CuspedCylinder { length: 10.0, radius: 1.0, cusp_scale: a },
            TAU,
            [EndLabel::CuspComplete; 2],
        )
        .unwrap();
        let expect = TAU * 10.0 + 2.0 * PI;
        assert!((area(&cc).unwrap() - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn half_infinite_cylinder_has_infinite_area() {
        let s = WarpedSurface::new(
            0.0,
            f64::INFINITY,
            WarpFn::Constant { c: 1.0 },
            TAU,
            [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
        )
        .unwrap();
        assert!(matches!(area(&s), Err(Error::InfiniteArea)));
    }

    #[test]
    fn profile_kappas() {
        let s = WarpedSurface::round_sphere();
        let g = Grid::new(-FRAC_PI_2 + 1e-3, FRAC_PI_2 - 1e-3, 64).unwrap();
        let p = curvature_profile(&s, &g).unwrap();
        assert!((p.kappa_spinor - 0.5).abs() < 1e-12);
        assert!(p.positive_curvature);
        assert!(!p.curvature_blows_up);
        for (sc, k) in p.scal.iter().zip(&p.gauss) {
            assert_eq!(*sc, 2.0 * k);
        }

        let c = WarpedSurface::flat_cylinder(4.0);
        let p = curvature_profile(&c, &Grid::new(0.0, 4.0, 32).unwrap()).unwrap();
        assert_eq!(p.kappa_spinor, 0.0);
        assert!(!p.positive_curvature);

        let cusp = WarpedSurface::new(
            0.0,
            f64::INFINITY,
            WarpFn::ExpCusp { c: 1.0 },
            TAU,
            [EndLabel::IncompleteBoundary, EndLabel::CuspComplete],
        )
        .unwrap();
        let p = curvature_profile(&cusp, &Grid::new(0.0, 6.0, 32).unwrap()).unwrap();
        assert!((p.kappa_spinor + 0.5).abs() < 1e-12);
    }

    #[test]
    fn end_classification() {
        let s = WarpedSurface::round_sphere();
        assert!(s.closes_up());
        let m2 = WarpedSurface::sphere_cover(2);
        assert!(!m2.closes_up());
        match m2.end_kind(true) {
            EndKind::ConePoint { cone_angle } => assert!((cone_angle - 2.0 * TAU).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(WarpedSurface::flat_cylinder(2.0).end_kind(false), EndKind::Boundary);
    }

    #[test]
    fn descriptor_json_is_versioned() {
        let s = WarpedSurface::sphere_cover(3);
        let text = s.to_json().unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(WarpedSurface::from_json(&text).unwrap(), s);
        let bumped = text.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(matches!(WarpedSurface::from_json(&bumped), Err(Error::SchemaVersion { .. })));
    }

    #[test]
    fn infinite_ends_round_trip() {
        let s = WarpedSurface::new(
            f64::NEG_INFINITY,
            f64::INFINITY,
            WarpFn::CuspedCylinder { length: 10.0, radius: 1.0, cusp_scale: 0.5 },
            TAU,
            [EndLabel::CuspComplete; 2],
        )
        .unwrap();
        let text = s.to_json().unwrap();
        assert!(text.contains("\"-inf\""));
        assert_eq!(WarpedSurface::from_json(&text).unwrap(), s);
        let bad = text.replace("\"-inf\"", "\"minus infinity\"");
        assert!(WarpedSurface::from_json(&bad).is_err());
    }
}
