//! Lower-bound formulas for the Dirac and Laplace fundamental tones, their
//! hypothesis checklists, and verdicts against computed values.
//!
//! Every verdict carries the full checklist of its bound. The decision rule
//! is shared: a statistic counts as *below* a bound when
//! `margin < −(tol_factor · error_bar + MARGIN_FLOOR)`.
//!
//! | hypotheses | below bound | verdict                 |
//! |------------|-------------|-------------------------|
//! | all pass   | no          | `holds`                 |
//! | all pass   | yes         | `unexpected`            |
//! | one fails  | yes         | `violated-as-predicted` |
//! | one fails  | no          | `inapplicable`          |

mod equality;
mod report;

pub use equality::{
    cutoff_function, cutoff_stability_check, killing_equality_check, CutoffLevel, CutoffReport, KillingDiagnostics,
    KillingLevel, EQUALITY_RESOLUTION, KILLING_THRESHOLD,
};
pub use report::{
    merge_bundles, Diagnostics, ExpectationCheck, GeometrySummary, Provenance, ReportBundle, SpectralReport,
    TestSectionValue, ToneSummary, CSV_HEADER, REPORT_SCHEMA_VERSION,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigensolve::{truncation_probe, GridPolicy, ProbeReport};
use crate::error::{Error, Result};
use crate::geometry::{kappa_at_infinity, EndKind, WarpedSurface};
use crate::operators::Grid;
use crate::spin_fourier::{FieldKind, SpinStructure};

/// Absolute slack added to every margin tolerance.
pub const MARGIN_FLOOR: f64 = 1e-9;

/// Default multiple of the error bar a bound may be missed by.
pub const DEFAULT_TOL_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Friedrich,
    Baer,
    Lichnerowicz,
    Essential,
}

impl BoundName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::Friedrich => "friedrich",
            BoundName::Baer => "baer",
            BoundName::Lichnerowicz => "lichnerowicz",
            BoundName::Essential => "essential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    ViolatedAsPredicted,
    Inapplicable,
    /// Hypotheses pass yet the statistic lies below the bound.
    Unexpected,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::ViolatedAsPredicted => "violated-as-predicted",
            Verdict::Inapplicable => "inapplicable",
            Verdict::Unexpected => "unexpected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Hypothesis {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Hypothesis { name: name.to_string(), passed, detail: detail.into() }
    }
}

/// A computed value compared against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub value: f64,
    pub error: f64,
    /// `tone`, or `test_section:<name>` for a Rayleigh quotient.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub bound: BoundName,
    pub formula_value: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub computed: f64,
    pub error_bar: f64,
    pub statistic_source: String,
    /// `computed − formula_value`.
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub probe: Option<ProbeReport>,
}

/// A formula value together with whether its own domain condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaValue {
    pub value: f64,
    pub applicable: bool,
}

/// `nκ/(n−1)`; applicable only for `κ > 0`.
pub fn friedrich_bound(n: u32, kappa: f64) -> Result<FormulaValue> {
    if n < 2 {
        return Err(Error::arg(format!("the Friedrich bound needs dimension n ≥ 2, got {n}")));
    }
    let n = n as f64;
    Ok(FormulaValue { value: n * kappa / (n - 1.0), applicable: kappa > 0.0 })
}

/// `4π/area`; applicable only for finite positive area. An inapplicable
/// value is reported as `0`.
pub fn baer_bound(area: f64) -> FormulaValue {
    if area > 0.0 && area.is_finite() {
        FormulaValue { value: 4.0 * PI / area, applicable: true }
    } else {
        FormulaValue { value: 0.0, applicable: false }
    }
}

/// Shared decision rule; see the module table.
pub fn decide(hypotheses: &[Hypothesis], margin: f64, error_bar: f64, tol_factor: f64) -> Verdict {
    let below = margin < -(tol_factor * error_bar + MARGIN_FLOOR);
    match (hypotheses.iter().all(|h| h.passed), below) {
        (true, false) => Verdict::Holds,
        (true, true) => Verdict::Unexpected,
        (false, true) => Verdict::ViolatedAsPredicted,
        (false, false) => Verdict::Inapplicable,
    }
}

fn verdict(
    bound: BoundName,
    formula: f64,
    hypotheses: Vec<Hypothesis>,
    stat: &Statistic,
    tol_factor: f64,
) -> BoundVerdict {
    let margin = stat.value - formula + 0.0;
    BoundVerdict {
        bound,
        formula_value: formula + 0.0,
        verdict: decide(&hypotheses, margin, stat.error, tol_factor),
        hypotheses,
        computed: stat.value + 0.0,
        error_bar: stat.error,
        statistic_source: stat.source.clone(),
        margin,
        probe: None,
    }
}

/// Spinor fundamental tone against `2κ` with `κ = inf scal/4` (`n = 2`).
pub fn friedrich_check(kappa_spinor: f64, stat: &Statistic, tol_factor: f64) -> BoundVerdict {
    let f = friedrich_bound(2, kappa_spinor).expect("n = 2");
    let hypotheses = vec![
        Hypothesis::new("dimension_at_least_two", true, "n = 2"),
        Hypothesis::new("curvature_endomorphism_positive", f.applicable, format!("inf scal/4 = {kappa_spinor}")),
    ];
    verdict(BoundName::Friedrich, f.value, hypotheses, stat, tol_factor)
}

/// Spinor fundamental tone against `4π/area`.
pub fn baer_check(
    surface: &WarpedSurface,
    spin: SpinStructure,
    area: Option<f64>,
    stat: &Statistic,
    tol_factor: f64,
) -> BoundVerdict {
    let b = baer_bound(area.unwrap_or(f64::INFINITY));
    let hypotheses = vec![
        // An interval times a circle is a sphere minus two closed sets.
        Hypothesis::new("genus_zero", true, format!("({}, {}) × circle", surface.t_min, surface.t_max)),
        Hypothesis::new(
            "finite_area",
            b.applicable,
            area.map_or("area diverges".to_string(), |a| format!("area = {a}")),
        ),
        Hypothesis::new(
            "spin_bounding_at_infinity",
            spin == SpinStructure::Bounding,
            format!("{} structure along the end circles", spin.name()),
        ),
    ];
    verdict(BoundName::Baer, b.value, hypotheses, stat, tol_factor)
}

/// First nonzero Laplace eigenvalue (or a test-function quotient orthogonal
/// to constants) against `2κ` with `κ = inf K`.
pub fn lichnerowicz_check(
    surface: &WarpedSurface,
    kappa_oneform: f64,
    stat: &Statistic,
    tol_factor: f64,
) -> BoundVerdict {
    let f = friedrich_bound(2, kappa_oneform).expect("n = 2");
    let ends = surface.ends();
    let complete = ends.iter().all(|e| e.is_removable());
    let detail = ends
        .iter()
        .map(|e| match e {
            EndKind::ConePoint { cone_angle } => format!("cone angle {cone_angle:.6}"),
            EndKind::Boundary => "boundary circle".to_string(),
            EndKind::Infinite => "infinite end".to_string(),
        })
        .collect::<Vec<_>>()
        .join("; ");
    let hypotheses = vec![
        Hypothesis::new("ricci_positive", f.applicable, format!("inf K = {kappa_oneform}")),
        Hypothesis::new("complete_after_filling_poles", complete, detail),
    ];
    verdict(BoundName::Lichnerowicz, f.value, hypotheses, stat, tol_factor)
}

/// Windows for a truncation probe: cone-point ends cut at `δ, δ/2, δ/4`,
/// infinite ends at `far, 2·far, 4·far`.
pub fn probe_windows(surface: &WarpedSurface, policy: &GridPolicy) -> Result<Vec<Grid>> {
    let h = policy.window(surface, policy.intervals, policy.pole_offset)?.h();
    (0..3)
        .map(|j| {
            let scale = (1usize << j) as f64;
            let p = GridPolicy { far_field: policy.far_field * scale, ..*policy };
            let delta = policy.pole_offset / scale;
            let g = p.window(surface, policy.intervals, delta)?;
            let cells = ((g.end() - g.start()) / h).round() as usize;
            p.window(surface, cells.max(policy.intervals), delta)
        })
        .collect()
}

/// Essential-spectrum bound `2κ_∞` via a truncation probe just below it.
pub fn essential_bound_check(
    surface: &WarpedSurface,
    spin: SpinStructure,
    policy: &GridPolicy,
    tail_width: f64,
) -> Result<BoundVerdict> {
    let stat_none = |formula: f64, hyps: Vec<Hypothesis>| BoundVerdict {
        bound: BoundName::Essential,
        formula_value: formula + 0.0,
        computed: formula + 0.0,
        error_bar: 0.0,
        statistic_source: "none".into(),
        margin: 0.0,
        verdict: if hyps.iter().all(|h| h.passed) { Verdict::Holds } else { Verdict::Inapplicable },
        hypotheses: hyps,
        probe: None,
    };
    let kappa = match kappa_at_infinity(surface, tail_width) {
        None => {
            let h = Hypothesis::new("curvature_positive_at_infinity", true, "no ends after filling removable poles");
            return Ok(stat_none(0.0, vec![h]));
        }
        Some(k) => k,
    };
    let bound = friedrich_bound(2, kappa)?.value;
    let h = Hypothesis::new("curvature_positive_at_infinity", kappa > 0.0, format!("liminf scal/4 = {kappa}"));
    if kappa <= 0.0 {
        return Ok(stat_none(bound, vec![h]));
    }
    let threshold = bound * (1.0 - 1e-3);
    let windows = probe_windows(surface, policy)?;
    let probe = truncation_probe(surface, FieldKind::Spinor(spin), &windows, threshold)?;
    Ok(BoundVerdict {
        bound: BoundName::Essential,
        formula_value: bound + 0.0,
        hypotheses: vec![h],
        computed: threshold,
        error_bar: 0.0,
        statistic_source: "truncation_probe".into(),
        margin: threshold - bound,
        verdict: if probe.stable { Verdict::Holds } else { Verdict::Unexpected },
        probe: Some(probe),
    })
}
