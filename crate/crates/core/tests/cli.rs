use std::path::Path;
use std::process::{Command, Output};

use diraclab::bounds::ReportBundle;

fn diraclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diraclab")).args(args).output().unwrap()
}

fn verify_to(dir: &Path, name: &str, scenario: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = diraclab(&["verify", "--scenario", scenario, "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn verify_round_sphere_passes() {
    let out = diraclab(&["verify", "--scenario", "RoundSphere", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let bundle = ReportBundle::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let tone = bundle.reports[0].diagnostics.tones.iter().find(|t| t.name == "laplace_first_nonzero").unwrap();
    assert!((tone.lambda_star - 2.0).abs() <= 1e-3);
}

#[test]
fn verify_counterexample_exits_zero() {
    let out = diraclab(&["verify", "--scenario", "FlatCylinder-L5-nonbounding", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("baer,") && text.contains("violated-as-predicted,violated-as-predicted,true"), "{text}");
}

#[test]
fn unknown_scenario_is_a_usage_error() {
    let out = diraclab(&["verify", "--scenario", "no-such-id"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-id"));
}

#[test]
fn empty_sweep_is_a_usage_error() {
    assert_eq!(diraclab(&["sweep", "--sweep", "L=7:3:1"]).status.code(), Some(64));
    assert_eq!(diraclab(&["sweep", "--sweep", "q=1:3:1"]).status.code(), Some(64));
}

#[test]
fn mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wrong.json");
    let mut s =
        diraclab::scenarios::Scenario::flat_cylinder(5.0, diraclab::spin_fourier::SpinStructure::NonBounding).unwrap();
    s.id = "WrongExpectation".into();
    for e in &mut s.expected {
        if e.bound == diraclab::bounds::BoundName::Baer {
            e.verdict = diraclab::bounds::Verdict::Holds;
        }
    }
    std::fs::write(&path, s.to_json().unwrap()).unwrap();
    let out = diraclab(&["verify", "--scenario", path.to_str().unwrap(), "--format", "pretty"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));
}

#[test]
fn malformed_report_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema_version\": 1, \"reports\": 3}").unwrap();
    assert_eq!(diraclab(&["report", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["verify", "--scenario", "all", "--format", "json", "--grid-n", "128"];
    let a = diraclab(&args);
    let b = diraclab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["verify", "--scenario", "CoverMk-3", "--format", "json"];
    let a = Command::new(env!("CARGO_BIN_EXE_diraclab")).args(args).env("DIRACLAB_THREADS", "1").output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_diraclab")).args(args).env("DIRACLAB_THREADS", "4").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_merges_and_sorts() {
    let dir = tempfile::tempdir().unwrap();
    let a = verify_to(dir.path(), "a.json", "FlatCylinder-L2-bounding");
    let b = verify_to(dir.path(), "b.json", "CoverMk-2");
    let out = diraclab(&["report", a.to_str().unwrap(), b.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let merged = ReportBundle::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let ids: Vec<&str> = merged.reports.iter().map(|r| r.scenario_id.as_str()).collect();
    assert_eq!(ids, ["CoverMk-2", "FlatCylinder-L2-bounding"]);

    let csv = diraclab(&["report", b.to_str().unwrap(), a.to_str().unwrap(), "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), diraclab::bounds::CSV_HEADER);
    assert!(text.find("CoverMk-2").unwrap() < text.find("FlatCylinder").unwrap());
}

#[test]
fn report_duplicate_warns_and_later_wins() {
    let dir = tempfile::tempdir().unwrap();
    let a = verify_to(dir.path(), "a.json", "FlatCylinder-L2-bounding");
    let text = std::fs::read_to_string(&a).unwrap().replace("Flat cylinder (0, 2)", "Edited cylinder (0, 2)");
    let b = dir.path().join("b.json");
    std::fs::write(&b, text).unwrap();
    let out = diraclab(&["report", a.to_str().unwrap(), b.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate scenario FlatCylinder-L2-bounding"));
    let merged = ReportBundle::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(merged.reports.len(), 1);
    assert!(merged.reports[0].description.starts_with("Edited"));
}

#[test]
fn report_version_mismatch_is_explicit() {
    let dir = tempfile::tempdir().unwrap();
    let a = verify_to(dir.path(), "a.json", "FlatCylinder-L2-bounding");
    let text = std::fs::read_to_string(&a).unwrap();
    let bumped = text.replacen("\"schema_version\": 1\n}", "\"schema_version\": 7\n}", 1);
    assert_ne!(text, bumped);
    let b = dir.path().join("b.json");
    std::fs::write(&b, bumped).unwrap();
    let out = diraclab(&["report", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema version 7"));
}

#[test]
fn sweep_shows_the_crossover() {
    let out = diraclab(&["sweep", "--sweep", "L=3,4.9348,7", "--spin", "nonbounding"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "baer_margin").unwrap();
    let margins: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert!(margins[0] > 0.0 && margins[1].abs() < 1e-5 && margins[2] < 0.0, "{margins:?}");
}

#[test]
fn sweep_k_gives_lichnerowicz_margins() {
    let out = diraclab(&["sweep", "--sweep", "k=1:3:1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<diraclab::cli::SweepRow> = serde_json::from_slice(&out.stdout).unwrap();
    let margins: Vec<f64> = rows
        .iter()
        .map(|r| r.bounds.iter().find(|b| b.bound == diraclab::bounds::BoundName::Lichnerowicz).unwrap().margin)
        .collect();
    for (m, want) in margins.iter().zip([0.0, -1.125, -4.0 / 3.0]) {
        assert!((m - want).abs() <= 1e-3, "{margins:?}");
    }
}

#[test]
fn sweep_n_error_shrinks() {
    let out = diraclab(&["sweep", "--sweep", "N=64,128,256", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<diraclab::cli::SweepRow> = serde_json::from_slice(&out.stdout).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| (r.laplace_tone - 2.0).abs()).collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[0], "{errs:?}");
}

#[test]
fn help_documents_precedence_and_exit_codes() {
    let out = diraclab(&["verify", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("command-line flags override the scenario file"));
    assert!(text.contains("64 usage error"));
}

#[test]
fn flags_override_scenario_policy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let mut s = diraclab::scenarios::Scenario::cover(3).unwrap();
    s.policy.intervals = Some(64);
    std::fs::write(&path, s.to_json().unwrap()).unwrap();
    let file = diraclab(&["verify", "--scenario", path.to_str().unwrap(), "--format", "json"]);
    let flag = diraclab(&["verify", "--scenario", path.to_str().unwrap(), "--format", "json", "--grid-n", "128"]);
    let n = |o: &Output| {
        ReportBundle::from_json(&String::from_utf8_lossy(&o.stdout)).unwrap().reports[0].provenance.intervals[0]
    };
    assert_eq!(n(&file), 64);
    assert_eq!(n(&flag), 128);
}

#[test]
fn catalog_command_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.json");
    let out = diraclab(&["catalog", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = diraclab::scenarios::parse_scenarios(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed, diraclab::scenarios::builtin_catalog());
}
