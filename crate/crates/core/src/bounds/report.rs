use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BoundName, BoundVerdict, CutoffReport, KillingDiagnostics, Verdict};
use crate::eigensolve::SolverKind;
use crate::error::{Error, Result};
use crate::geometry::EndKind;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "scenario_id,bound,formula_value,computed,error_bar,margin,verdict,expected_verdict,match";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    /// `None` when the area integral diverges.
    pub area: Option<f64>,
    /// `inf scal/4`.
    pub kappa_spinor: f64,
    /// `inf K`.
    pub kappa_oneform: f64,
    /// `None` when every end is a removable pole.
    pub kappa_infinity: Option<f64>,
    pub ends: [EndKind; 2],
    pub closes_up: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneSummary {
    /// `dirac_square` or `laplace_first_nonzero`.
    pub name: String,
    pub lambda_star: f64,
    pub error: f64,
    pub mode: f64,
    pub certified: bool,
    pub solver: SolverKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSectionValue {
    pub name: String,
    pub mode: f64,
    pub rayleigh_quotient: f64,
    pub norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub bound: BoundName,
    pub expected_verdict: Verdict,
    pub actual_verdict: Option<Verdict>,
    pub expected_value: Option<f64>,
    pub computed: Option<f64>,
    pub tolerance: f64,
    pub provenance: String,
    pub verdict_match: bool,
    pub value_match: bool,
}

impl ExpectationCheck {
    pub fn passed(&self) -> bool {
        self.verdict_match && self.value_match
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tones: Vec<ToneSummary>,
    pub test_sections: Vec<TestSectionValue>,
    pub killing: Option<KillingDiagnostics>,
    pub cutoff: Option<CutoffReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub intervals: Vec<usize>,
    pub pole_offsets: Vec<f64>,
    pub far_field: f64,
    pub mode_cutoff: usize,
    pub tol_factor: f64,
    pub solver: SolverKind,
    pub schema_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub scenario_id: String,
    pub description: String,
    pub geometry: GeometrySummary,
    pub verdicts: Vec<BoundVerdict>,
    pub diagnostics: Diagnostics,
    pub expectations: Vec<ExpectationCheck>,
    /// Every expectation and every applicable diagnostic passed.
    pub passed: bool,
    pub provenance: Provenance,
}

/// Serializes through `serde_json::Value` so object keys come out sorted.
fn sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

impl SpectralReport {
    pub fn verdict(&self, bound: BoundName) -> Option<&BoundVerdict> {
        self.verdicts.iter().find(|v| v.bound == bound)
    }

    pub fn to_json(&self) -> Result<String> {
        sorted_json(self)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .map(|v| {
                let exp = self.expectations.iter().find(|e| e.bound == v.bound);
                format!(
                    "{},{},{},{},{},{},{},{},{}",
                    self.scenario_id,
                    v.bound.as_str(),
                    v.formula_value,
                    v.computed,
                    v.error_bar,
                    v.margin,
                    v.verdict.as_str(),
                    exp.map_or("", |e| e.expected_verdict.as_str()),
                    exp.map_or(String::new(), |e| e.passed().to_string()),
                )
            })
            .collect()
    }

    pub fn to_pretty(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}  [{}]", self.scenario_id, if self.passed { "pass" } else { "FAIL" });
        let _ = writeln!(s, "  {}", self.description);
        match self.geometry.area {
            Some(a) => {
                let _ = writeln!(s, "  area {a:.10}");
            }
            None => {
                let _ = writeln!(s, "  area infinite");
            }
        }
        for t in &self.diagnostics.tones {
            let _ = writeln!(
                s,
                "  {:<22} {:>16.10} ± {:.2e}  (ν = {}{})",
                t.name,
                t.lambda_star,
                t.error,
                t.mode,
                if t.certified { "" } else { ", uncertified" }
            );
        }
        for t in &self.diagnostics.test_sections {
            let _ = writeln!(s, "  section {:<14} RQ {:>16.10}  |φ|² {:.10}", t.name, t.rayleigh_quotient, t.norm_sq);
        }
        for v in &self.verdicts {
            let exp = self.expectations.iter().find(|e| e.bound == v.bound);
            let _ = writeln!(
                s,
                "  {:<13} bound {:>12.8}  computed {:>12.8}  margin {:>+12.4e}  {:<22}{}",
                v.bound.as_str(),
                v.formula_value,
                v.computed,
                v.margin,
                v.verdict.as_str(),
                exp.map_or(String::new(), |e| format!(
                    " expected {}{}",
                    e.expected_verdict.as_str(),
                    if e.passed() { "" } else { "  MISMATCH" }
                ))
            );
            for h in &v.hypotheses {
                let _ = writeln!(s, "      [{}] {}: {}", if h.passed { "x" } else { " " }, h.name, h.detail);
            }
        }
        if let Some(k) = &self.diagnostics.killing {
            if k.applicable {
                for l in &k.levels {
                    let _ = writeln!(
                        s,
                        "  killing N={:<6} δ={:<10.3e} norm variation {:.3e}  bochner ratio {:.3e}",
                        l.intervals, l.pole_offset, l.norm_variation, l.bochner_ratio
                    );
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub reports: Vec<SpectralReport>,
}

impl ReportBundle {
    pub fn new(mut reports: Vec<SpectralReport>) -> Self {
        reports.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
        ReportBundle { schema_version: REPORT_SCHEMA_VERSION, reports }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        sorted_json(self)
    }

    /// Checks the schema version before decoding the rest.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let found = v
            .get("schema_version")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::arg("report has no schema_version"))?;
        if found != REPORT_SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion { found: found as u32, expected: REPORT_SCHEMA_VERSION });
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.reports {
            for row in r.csv_rows() {
                s.push_str(&row);
                s.push('\n');
            }
        }
        s
    }

    pub fn to_pretty(&self) -> String {
        self.reports.iter().map(SpectralReport::to_pretty).collect::<Vec<_>>().join("\n")
    }
}

/// Union of bundles sorted by scenario id; a later duplicate id replaces an
/// earlier one with a warning.
pub fn merge_bundles(bundles: Vec<ReportBundle>) -> Result<ReportBundle> {
    let mut by_id: BTreeMap<String, SpectralReport> = BTreeMap::new();
    for b in bundles {
        if b.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: b.schema_version, expected: REPORT_SCHEMA_VERSION });
        }
        for r in b.reports {
            if by_id.contains_key(&r.scenario_id) {
                log::warn!("duplicate scenario {}; keeping the later report", r.scenario_id);
            }
            by_id.insert(r.scenario_id.clone(), r);
        }
    }
    Ok(ReportBundle::new(by_id.into_values().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(id: &str, desc: &str) -> SpectralReport {
        SpectralReport {
            scenario_id: id.into(),
            description: desc.into(),
            geometry: GeometrySummary {
                area: Some(1.0),
                kappa_spinor: 0.0,
                kappa_oneform: 0.0,
                kappa_infinity: None,
                ends: [EndKind::Boundary, EndKind::Boundary],
                closes_up: false,
            },
            verdicts: Vec::new(),
            diagnostics: Diagnostics { tones: Vec::new(), test_sections: Vec::new(), killing: None, cutoff: None },
            expectations: Vec::new(),
            passed: true,
            provenance: Provenance {
                intervals: vec![16],
                pole_offsets: vec![],
                far_field: 1.0,
                mode_cutoff: 8,
                tol_factor: 3.0,
                solver: SolverKind::Dense,
                schema_version: REPORT_SCHEMA_VERSION,
            },
        }
    }

    #[test]
    fn merge_sorts_and_later_wins() {
        let a = ReportBundle::new(vec![report("b", "first"), report("a", "x")]);
        let b = ReportBundle::new(vec![report("c", "y"), report("b", "second")]);
        let m = merge_bundles(vec![a, b]).unwrap();
        let ids: Vec<&str> = m.reports.iter().map(|r| r.scenario_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(m.reports[1].description, "second");
    }

    #[test]
    fn version_mismatch_is_an_error() {
        let mut a = ReportBundle::new(vec![report("a", "")]);
        a.schema_version = 99;
        assert!(matches!(merge_bundles(vec![a.clone()]), Err(Error::SchemaVersion { found: 99, .. })));
        let text = a.to_json().unwrap();
        assert!(matches!(ReportBundle::from_json(&text), Err(Error::SchemaVersion { found: 99, .. })));
    }

    #[test]
    fn json_round_trip_with_sorted_keys() {
        let a = ReportBundle::new(vec![report("a", "d")]);
        let text = a.to_json().unwrap();
        assert_eq!(ReportBundle::from_json(&text).unwrap(), a);
        let reports = text.find("\"reports\"").unwrap();
        let schema = text.find("\"schema_version\"").unwrap();
        assert!(reports < schema);
        assert_eq!(text, a.to_json().unwrap());
    }

    #[test]
    fn csv_header_is_stable() {
        let a = ReportBundle::new(vec![report("a", "")]);
        assert_eq!(a.to_csv().lines().next().unwrap(), CSV_HEADER);
    }
}
