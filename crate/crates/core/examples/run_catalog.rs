//! Runs every built-in scenario and prints the pretty report.

use diraclab::bounds::ReportBundle;
use diraclab::harness::run_scenario;
use diraclab::scenarios::{builtin_catalog, PolicyOverrides};

pub fn main() {
    let flags = PolicyOverrides { intervals: Some(128), ..PolicyOverrides::default() };
    let reports = builtin_catalog().iter().map(|s| run_scenario(s, &flags).unwrap()).collect();
    let bundle = ReportBundle::new(reports);
    print!("{}", bundle.to_pretty());
    println!("all passed: {}", bundle.passed());
}
