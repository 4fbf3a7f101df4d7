//! Command-line front end: `verify`, `sweep`, `report` and `catalog`.
//!
//! Exit codes: [`EXIT_PASS`], [`EXIT_MISMATCH`], [`EXIT_INTERNAL`],
//! [`EXIT_USAGE`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{merge_bundles, BoundName, ReportBundle, SpectralReport};
use crate::error::{Error, Result};
use crate::harness::run_scenario;
use crate::scenarios::{builtin_catalog, catalog_document, catalog_to_json, resolve, PolicyOverrides, Scenario};
use crate::spin_fourier::SpinStructure;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Caps the worker pool used for independent scenarios and sweep points.
pub const THREADS_ENV: &str = "DIRACLAB_THREADS";

/// Smallest accepted `--grid-n`.
pub const MIN_GRID_N: usize = 16;

const PRECEDENCE: &str = "\
Settings are layered: command-line flags override the scenario file's \
`policy` block, which overrides the built-in defaults \
(N = 512, δ = 0.01, far field 30, 8 modes, tolerance factor 3).

Exit codes: 0 all expectations met, 2 verdict mismatch, 1 runtime error, \
64 usage error (bad flags, unknown scenario, empty sweep range).

Environment: DIRACLAB_THREADS caps the number of worker threads.";

#[derive(Debug, Parser)]
#[command(name = "diraclab", version, about = "Fundamental tones and spectral lower bounds on surfaces of revolution")]
#[command(after_long_help = PRECEDENCE)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bound harness on one or more scenarios.
    #[command(after_long_help = PRECEDENCE)]
    Verify(VerifyArgs),
    /// Sweep cylinder length `L`, cover degree `k` or grid size `N`.
    #[command(after_long_help = PRECEDENCE)]
    Sweep(SweepArgs),
    /// Merge JSON reports into one, sorted by scenario id.
    Report(ReportArgs),
    /// Print the built-in catalog in the scenario-file format.
    Catalog(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Intervals on the coarsest grid (levels use N, 2N, 4N).
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Coarsest cut-off distance δ from a cone-point end.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of nonnegative angular frequencies swept initially.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Verdict tolerance factor applied to the error bar.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// `all`, a built-in scenario id, or a path to a scenario JSON file.
    #[arg(long, default_value = "all")]
    pub scenario: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// `param=a:b:step` or `param=v1,v2,...` with param one of L, k, N.
    #[arg(long)]
    pub sweep: String,
    /// Spin structure for `L` sweeps.
    #[arg(long, value_enum, default_value_t = SpinArg::Nonbounding)]
    pub spin: SpinArg,
    /// Base scenario for `N` sweeps.
    #[arg(long, default_value = "RoundSphere")]
    pub scenario: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpinArg {
    Bounding,
    Nonbounding,
}

impl From<SpinArg> for SpinStructure {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Bounding => SpinStructure::Bounding,
            SpinArg::Nonbounding => SpinStructure::NonBounding,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report files written by `verify --format json`; later files win on duplicate ids.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Everything a verification run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub overrides: PolicyOverrides,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl GridArgs {
    fn overrides(&self) -> Result<PolicyOverrides> {
        if let Some(n) = self.grid_n {
            if n < MIN_GRID_N {
                return Err(Error::arg(format!("--grid-n must be at least {MIN_GRID_N}, got {n}")));
            }
        }
        for (name, v) in [("--delta", self.delta), ("--tol", self.tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::arg(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.modes == Some(0) {
            return Err(Error::arg("--modes must be at least 1"));
        }
        Ok(PolicyOverrides {
            intervals: self.grid_n,
            pole_offset: self.delta,
            mode_cutoff: self.modes,
            tol_factor: self.tol,
            ..PolicyOverrides::default()
        })
    }
}

impl RunConfig {
    pub fn from_args(args: &VerifyArgs) -> Result<Self> {
        Ok(RunConfig {
            scenario: args.scenario.clone(),
            overrides: args.grid.overrides()?,
            format: args.format,
            out: args.output.out.clone(),
        })
    }
}

/// Runs every resolved scenario; reports come back sorted by id.
pub fn cmd_verify(config: &RunConfig) -> Result<ReportBundle> {
    let scenarios = resolve(&config.scenario)?;
    let reports =
        scenarios.par_iter().map(|s| run_scenario(s, &config.overrides)).collect::<Result<Vec<SpectralReport>>>()?;
    Ok(ReportBundle::new(reports))
}

pub fn render_bundle(bundle: &ReportBundle, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => bundle.to_json()?,
        Format::Csv => bundle.to_csv(),
        Format::Pretty => bundle.to_pretty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "L")]
    Length,
    #[serde(rename = "k")]
    Degree,
    #[serde(rename = "N")]
    Intervals,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Length => "L",
            SweepParam::Degree => "k",
            SweepParam::Intervals => "N",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Parses `param=a:b:step` (inclusive of `b` up to rounding) or
/// `param=v1,v2,...`.
pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let (name, range) =
        text.split_once('=').ok_or_else(|| Error::arg(format!("sweep {text:?} is not of the form param=a:b:step")))?;
    let param = match name.trim() {
        "L" => SweepParam::Length,
        "k" => SweepParam::Degree,
        "N" => SweepParam::Intervals,
        other => return Err(Error::arg(format!("unknown sweep parameter {other:?}; use L, k or N"))),
    };
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::arg(format!("bad number {s:?} in sweep {text:?}")))
    };
    let values: Vec<f64> = if range.contains(':') {
        let parts: Vec<&str> = range.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(Error::arg(format!("sweep {text:?} needs exactly a:b:step")));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::arg(format!("sweep step must be positive, got {step}")));
        }
        let count = ((b - a) / step + 1e-9).floor();
        if count < 0.0 {
            return Err(Error::arg(format!("empty sweep range {range:?}")));
        }
        (0..=count as usize).map(|i| a + i as f64 * step).collect()
    } else {
        range.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(Error::arg(format!("empty sweep range {range:?}")));
    }
    for &v in &values {
        let ok = match param {
            SweepParam::Length => v > 0.0,
            SweepParam::Degree => v >= 1.0 && v.fract() == 0.0,
            SweepParam::Intervals => v >= MIN_GRID_N as f64 && v.fract() == 0.0,
        };
        if !ok {
            return Err(Error::arg(format!("{v} is not a valid value of {}", param.as_str())));
        }
    }
    Ok(SweepSpec { param, values })
}

/// One sweep point: the tones and every bound's value and margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub scenario_id: String,
    pub dirac_tone: Option<f64>,
    pub dirac_error: Option<f64>,
    pub laplace_tone: f64,
    pub laplace_error: f64,
    pub bounds: Vec<SweepBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBound {
    pub bound: BoundName,
    pub formula_value: f64,
    pub computed: f64,
    pub margin: f64,
    pub verdict: crate::bounds::Verdict,
}

const SWEEP_BOUNDS: [BoundName; 4] =
    [BoundName::Friedrich, BoundName::Baer, BoundName::Lichnerowicz, BoundName::Essential];

fn sweep_scenario(
    spec: &SweepSpec,
    value: f64,
    spin: SpinStructure,
    base: &str,
) -> Result<(Scenario, PolicyOverrides)> {
    Ok(match spec.param {
        SweepParam::Length => (Scenario::flat_cylinder(value, spin)?, PolicyOverrides::default()),
        SweepParam::Degree => (Scenario::cover(value as u32)?, PolicyOverrides::default()),
        SweepParam::Intervals => {
            let mut found = resolve(base)?;
            if found.len() != 1 {
                return Err(Error::arg(format!(
                    "N sweeps need a single base scenario, {base:?} names {}",
                    found.len()
                )));
            }
            (found.remove(0), PolicyOverrides { intervals: Some(value as usize), ..PolicyOverrides::default() })
        }
    })
}

fn row_from(spec: &SweepSpec, value: f64, report: &SpectralReport) -> SweepRow {
    let tone = |name: &str| report.diagnostics.tones.iter().find(|t| t.name == name);
    let dirac = tone("dirac_square");
    let laplace = tone("laplace_first_nonzero");
    SweepRow {
        param: spec.param,
        value,
        scenario_id: report.scenario_id.clone(),
        dirac_tone: dirac.map(|t| t.lambda_star),
        dirac_error: dirac.map(|t| t.error),
        laplace_tone: laplace.map_or(f64::NAN, |t| t.lambda_star),
        laplace_error: laplace.map_or(f64::NAN, |t| t.error),
        bounds: report
            .verdicts
            .iter()
            .map(|v| SweepBound {
                bound: v.bound,
                formula_value: v.formula_value,
                computed: v.computed,
                margin: v.margin,
                verdict: v.verdict,
            })
            .collect(),
    }
}

/// Runs the harness at every sweep value; rows keep the order of `spec`.
pub fn cmd_sweep(spec: &SweepSpec, spin: SpinStructure, base: &str, flags: &PolicyOverrides) -> Result<Vec<SweepRow>> {
    spec.values
        .par_iter()
        .map(|&v| {
            let (scenario, extra) = sweep_scenario(spec, v, spin, base)?;
            let report = run_scenario(&scenario, &flags.layered(&extra))?;
            Ok(row_from(spec, v, &report))
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("param,value,scenario_id,dirac_tone,dirac_error,laplace_tone,laplace_error");
    for b in SWEEP_BOUNDS {
        let n = b.as_str();
        let _ = write!(s, ",{n}_bound,{n}_computed,{n}_margin,{n}_verdict");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            r.param.as_str(),
            r.value,
            r.scenario_id,
            opt(r.dirac_tone),
            opt(r.dirac_error),
            r.laplace_tone,
            r.laplace_error
        );
        for b in SWEEP_BOUNDS {
            match r.bounds.iter().find(|x| x.bound == b) {
                Some(x) => {
                    let _ = write!(s, ",{},{},{},{}", x.formula_value, x.computed, x.margin, x.verdict.as_str());
                }
                None => s.push_str(",,,,"),
            }
        }
        s.push('\n');
    }
    s
}

fn sweep_pretty(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(
            s,
            "{}={:<10} {:<32} D² {:>14}  Δ {:>14.10}",
            r.param.as_str(),
            r.value,
            r.scenario_id,
            r.dirac_tone.map_or("-".into(), |x| format!("{x:.10}")),
            r.laplace_tone
        );
        for b in &r.bounds {
            let _ = writeln!(
                s,
                "    {:<13} bound {:>12.8}  margin {:>+12.4e}  {}",
                b.bound.as_str(),
                b.formula_value,
                b.margin,
                b.verdict.as_str()
            );
        }
    }
    s
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => sweep_csv(rows),
        Format::Pretty => sweep_pretty(rows),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::to_value(rows)?)?;
            s.push('\n');
            s
        }
    })
}

/// Reads and merges report files in the given order.
pub fn cmd_report(paths: &[PathBuf]) -> Result<ReportBundle> {
    let bundles =
        paths.iter().map(|p| ReportBundle::from_json(&std::fs::read_to_string(p)?)).collect::<Result<Vec<_>>>()?;
    merge_bundles(bundles)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn install_pool() {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    if let Some(n) = threads {
        // A pool installed earlier in the process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

enum Failure {
    Usage(Error),
    Internal(Error),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

/// Resolution failures are the caller's fault; anything later is internal.
fn classify(e: Error) -> Failure {
    match e {
        Error::Argument(_) | Error::Catalog(_) => Failure::Usage(e),
        other => Failure::Internal(other),
    }
}

fn dispatch(cli: Cli) -> std::result::Result<i32, Failure> {
    match cli.command {
        Command::Verify(args) => {
            let config = RunConfig::from_args(&args).map_err(usage)?;
            resolve(&config.scenario).map_err(classify)?;
            let bundle = cmd_verify(&config).map_err(Failure::Internal)?;
            emit(&render_bundle(&bundle, config.format).map_err(Failure::Internal)?, &config.out)
                .map_err(Failure::Internal)?;
            Ok(if bundle.passed() { EXIT_PASS } else { EXIT_MISMATCH })
        }
        Command::Sweep(args) => {
            let spec = parse_sweep(&args.sweep).map_err(usage)?;
            let flags = args.grid.overrides().map_err(usage)?;
            if spec.param == SweepParam::Intervals {
                resolve(&args.scenario).map_err(classify)?;
            }
            let rows = cmd_sweep(&spec, args.spin.into(), &args.scenario, &flags).map_err(classify)?;
            emit(&render_sweep(&rows, args.format).map_err(Failure::Internal)?, &args.output.out)
                .map_err(Failure::Internal)?;
            Ok(EXIT_PASS)
        }
        Command::Report(args) => {
            let bundle = cmd_report(&args.paths).map_err(Failure::Internal)?;
            emit(&render_bundle(&bundle, args.format).map_err(Failure::Internal)?, &args.output.out)
                .map_err(Failure::Internal)?;
            Ok(EXIT_PASS)
        }
        Command::Catalog(out) => {
            let text = catalog_to_json(&catalog_document(builtin_catalog())).map_err(Failure::Internal)?;
            emit(&text, &out.out).map_err(Failure::Internal)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    install_pool();
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("diraclab: {e}");
            EXIT_USAGE
        }
        Err(Failure::Internal(e)) => {
            eprintln!("diraclab: {e}");
            EXIT_INTERNAL
        }
    }
}
