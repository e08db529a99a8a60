//! Experiment runner behind the `inexact-opt` binary: TOML run configs,
//! trace CSV and report JSON outputs, α sweeps, the `c(θ)` table and
//! re-verification of stored traces.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{full_report_with_series, DiagnosticsReport, DiagnosticsSettings, Verdict};
use crate::error::{Error, Result};
use crate::noise::{c_theta, NoiseKind, NoiseModel, NoiseSchedule};
use crate::problems::{Problem, ProblemSpec};
use crate::solvers::{self, Extras, IterateRecord, LemmaConstants, RunOutput, Scheme, SolverConfig, StepParams, Trace};

/// Exit status for a successful command.
pub const EXIT_OK: i32 = 0;
/// The run finished but a check failed or it diverged unexpectedly.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Bad usage, config, pairing or file schema.
pub const EXIT_USAGE: i32 = 2;
/// The run hit a non-finite value or broke a model assumption.
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NumericFailure { .. } | Error::ModelViolation(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

/// A step size given either directly or as a fraction of the scheme's upper
/// limit (`1/L`, `1/M`, `1/N` or `2/L_f`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepValue {
    Absolute(f64),
    Fraction { fraction: f64 },
}

impl StepValue {
    fn resolve(self, limit: f64) -> Result<f64> {
        match self {
            StepValue::Absolute(v) => Ok(v),
            StepValue::Fraction { fraction } if fraction > 0.0 && fraction < 1.0 => {
                if limit.is_finite() {
                    Ok(fraction * limit)
                } else {
                    Err(Error::InvalidConfig(
                        "fractional step needs a positive Lipschitz constant; give the step directly".into(),
                    ))
                }
            }
            StepValue::Fraction { fraction } => Err(Error::InvalidConfig(format!(
                "step fraction must lie in (0, 1), got {fraction}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepSpec {
    Ipg { h: StepValue },
    Palm { gamma: StepValue, lambda: StepValue },
    Pire { mu: StepValue },
    Dc { gamma: StepValue },
    Admm { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    #[serde(flatten)]
    pub steps: StepSpec,
    pub max_iters: usize,
    #[serde(default)]
    pub stop_tol: f64,
    #[serde(default)]
    pub initial_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub name: Option<String>,
    /// The run is a divergence demo: success means a `diverged` verdict.
    #[serde(default)]
    pub expect_divergence: bool,
}

/// Parsed run config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub run: RunSection,
    pub problem: ProblemSpec,
    pub solver: SolverSpec,
    pub noise: NoiseSchedule,
    /// Second stream of the splitting scheme; defaults to `noise`.
    #[serde(default)]
    pub noise_y: Option<NoiseSchedule>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSettings,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Builds the problem and resolves the solver settings against it.
    pub fn build(&self) -> Result<(Problem, SolverConfig)> {
        let problem = self.problem.build()?;
        let params = resolve_steps(&self.solver.steps, &problem)?;
        let noise = match params {
            StepParams::Admm { .. } => NoiseModel::Pair {
                x: self.noise.clone(),
                y: self.noise_y.clone().unwrap_or_else(|| self.noise.clone()),
            },
            _ if self.noise_y.is_some() => {
                return Err(Error::InvalidConfig("noise_y only applies to the admm solver".into()))
            }
            _ => NoiseModel::Single {
                schedule: self.noise.clone(),
            },
        };
        let config = SolverConfig {
            params,
            max_iters: self.solver.max_iters,
            stop_tol: self.solver.stop_tol,
            noise,
            initial_point: self.solver.initial_point.clone(),
        };
        Ok((problem, config))
    }
}

fn resolve_steps(spec: &StepSpec, problem: &Problem) -> Result<StepParams> {
    let pairing = |scheme: Scheme| {
        Error::InvalidConfig(format!(
            "solver {} runs on {} problems, config has a {} problem",
            scheme.name(),
            scheme.family(),
            problem.family()
        ))
    };
    Ok(match (spec, problem) {
        (StepSpec::Ipg { h }, Problem::Composite(p)) => StepParams::Ipg {
            h: h.resolve(1.0 / p.f.lipschitz())?,
        },
        (StepSpec::Palm { gamma, lambda }, Problem::Block(p)) => StepParams::Palm {
            gamma: gamma.resolve(1.0 / p.m)?,
            lambda: lambda.resolve(1.0 / p.n)?,
        },
        (StepSpec::Pire { mu }, Problem::Reweighted(p)) => StepParams::Pire {
            mu: mu.resolve(2.0 / p.f.lipschitz())?,
        },
        (StepSpec::Dc { gamma }, Problem::Dc(p)) => StepParams::Dc {
            gamma: gamma.resolve(2.0 / p.f.lipschitz())?,
        },
        (StepSpec::Admm { alpha, beta }, Problem::Admm(_)) => StepParams::Admm {
            alpha: *alpha,
            beta: *beta,
        },
        (StepSpec::Ipg { .. }, _) => return Err(pairing(Scheme::Ipg)),
        (StepSpec::Palm { .. }, _) => return Err(pairing(Scheme::Palm)),
        (StepSpec::Pire { .. }, _) => return Err(pairing(Scheme::Pire)),
        (StepSpec::Dc { .. }, _) => return Err(pairing(Scheme::Dc)),
        (StepSpec::Admm { .. }, _) => return Err(pairing(Scheme::Admm)),
    })
}

/// Everything `verify` needs besides the trace; written as `constants.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunAudit {
    pub scheme: Scheme,
    pub params: StepParams,
    pub constants: LemmaConstants,
    pub noise: NoiseModel,
    pub diagnostics: DiagnosticsSettings,
    pub expect_divergence: bool,
    pub problem: ProblemSpec,
    pub max_iters: usize,
    pub stop_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub scheme: Scheme,
    pub steps: usize,
    pub stopped_early: bool,
    pub point: Vec<f64>,
    pub objective: f64,
}

/// Result of a completed `run`.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: DiagnosticsReport,
    pub output: RunOutput,
    pub exit_code: i32,
}

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";
pub const CONSTANTS_FILE: &str = "constants.json";
pub const SOLUTION_FILE: &str = "solution.json";

fn extra_columns(scheme: Scheme) -> &'static [&'static str] {
    match scheme {
        Scheme::Pire => &["min_weight", "max_weight"],
        Scheme::Admm => &["dual_step", "y_step", "noise_y_diff", "d_step"],
        _ => &[],
    }
}

const BASE_COLUMNS: [&str; 7] = ["k", "obj", "step_norm", "eta", "witness_norm", "t_k", "xi"];

pub fn trace_header(scheme: Scheme) -> Vec<&'static str> {
    BASE_COLUMNS.iter().chain(extra_columns(scheme)).copied().collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Trace CSV with 17 significant digits. `series` holds `(t_k, ξ_k)` when
/// available.
pub fn write_trace_csv(path: &Path, trace: &Trace, series: Option<&(Vec<f64>, Vec<f64>)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    w.write_record(trace_header(trace.scheme)).map_err(csv_io)?;
    for (i, r) in trace.records.iter().enumerate() {
        let mut row = vec![
            r.k.to_string(),
            fmt(r.obj),
            fmt_opt(r.step_norm),
            fmt_opt(r.eta),
            fmt_opt(r.witness_norm),
            fmt_opt(series.map(|s| s.0[i])),
            fmt_opt(series.map(|s| s.1[i])),
        ];
        match (&r.extras, trace.scheme) {
            (Extras::Pire { min_weight, max_weight }, _) => {
                row.extend([fmt(*min_weight), fmt(*max_weight)]);
            }
            (
                Extras::Admm {
                    dual_step,
                    y_step,
                    noise_y_diff,
                    d_step,
                },
                _,
            ) => row.extend([fmt(*dual_step), fmt(*y_step), fmt(*noise_y_diff), fmt(*d_step)]),
            (Extras::None, s) => row.extend(extra_columns(s).iter().map(|_| String::new())),
        }
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Schema(format!("{other:?}")),
    }
}

/// Reads a trace CSV back. Iterates are not stored, so `x` is empty.
/// Any shape or header mismatch is a schema error.
pub fn read_trace_csv(path: &Path, scheme: Scheme) -> Result<Trace> {
    let bytes = fs::read(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    // the writer always ends with a newline; its absence means a cut-off file
    if bytes.last() != Some(&b'\n') {
        return Err(Error::Schema(format!("{} is truncated", path.display())));
    }
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let expected = trace_header(scheme);
    if header != expected {
        return Err(Error::Schema(format!(
            "trace header {header:?} does not match {expected:?}"
        )));
    }
    let n_extra = extra_columns(scheme).len();
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::Schema(format!("row {}: {e}", i + 1)))?;
        let cell = |j: usize| -> Result<Option<f64>> {
            let s = &row[j];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|e| Error::Schema(format!("row {}, column {}: {e}", i + 1, expected[j])))
            }
        };
        let k: usize = row[0]
            .parse()
            .map_err(|e| Error::Schema(format!("row {}: bad index: {e}", i + 1)))?;
        if k != i {
            return Err(Error::Schema(format!("row {} has index {k}", i + 1)));
        }
        let obj = cell(1)?.ok_or_else(|| Error::Schema(format!("row {} has no objective", i + 1)))?;
        let extras_vals: Vec<Option<f64>> = (0..n_extra).map(|j| cell(7 + j)).collect::<Result<_>>()?;
        let extras = if extras_vals.iter().all(Option::is_none) {
            Extras::None
        } else if let Some(v) = extras_vals.iter().copied().collect::<Option<Vec<f64>>>() {
            match scheme {
                Scheme::Pire => Extras::Pire {
                    min_weight: v[0],
                    max_weight: v[1],
                },
                _ => Extras::Admm {
                    dual_step: v[0],
                    y_step: v[1],
                    noise_y_diff: v[2],
                    d_step: v[3],
                },
            }
        } else {
            return Err(Error::Schema(format!("row {} has partial scheme columns", i + 1)));
        };
        records.push(IterateRecord {
            k,
            x: Vec::new(),
            obj,
            step_norm: cell(2)?,
            eta: cell(3)?,
            witness_norm: cell(4)?,
            extras,
        });
    }
    validate_trace_shape(&records)?;
    Ok(Trace { scheme, records })
}

fn validate_trace_shape(records: &[IterateRecord]) -> Result<()> {
    let n = records.len();
    if n < 2 {
        return Err(Error::Schema(format!("trace has {n} rows, need at least 2")));
    }
    for (i, r) in records.iter().enumerate() {
        let last = i + 1 == n;
        if r.step_norm.is_some() == last || r.eta.is_some() == last {
            return Err(Error::Schema(format!(
                "row {i}: step columns must be filled on every row but the last"
            )));
        }
        if r.witness_norm.is_some() != (i > 0) {
            return Err(Error::Schema(format!(
                "row {i}: witness must be filled on every row but the first"
            )));
        }
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn report_json(report: &DiagnosticsReport) -> String {
    let mut s = report.to_json();
    s.push('\n');
    s
}

/// Writes the four run artifacts and returns the report.
fn emit(out_dir: &Path, config: &RunConfig, solver: &SolverConfig, output: &RunOutput) -> Result<DiagnosticsReport> {
    fs::create_dir_all(out_dir)?;
    let audit = RunAudit {
        scheme: output.trace.scheme,
        params: solver.params,
        constants: output.constants,
        noise: output.noise.clone(),
        diagnostics: config.diagnostics,
        expect_divergence: config.run.expect_divergence,
        problem: config.problem.clone(),
        max_iters: solver.max_iters,
        stop_tol: solver.stop_tol,
    };
    write_json(&out_dir.join(CONSTANTS_FILE), &audit)?;
    let last = output.trace.records.last().expect("trace has an initial record");
    write_json(
        &out_dir.join(SOLUTION_FILE),
        &Solution {
            scheme: output.trace.scheme,
            steps: output.trace.steps(),
            stopped_early: output.stopped_early,
            point: last.x.clone(),
            objective: last.obj,
        },
    )?;
    let (report, series) = full_report_with_series(&output.trace, &output.constants, &output.noise, &config.diagnostics)?;
    write_trace_csv(&out_dir.join(TRACE_FILE), &output.trace, series.as_ref())?;
    fs::write(out_dir.join(REPORT_FILE), report_json(&report))?;
    Ok(report)
}

/// Runs one configured experiment and writes its artifacts to `out_dir`.
///
/// On a numeric failure the partial trace is written (without a report when
/// it has fewer than two iterates) and the failure is returned.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    let (problem, solver) = config.build()?;
    let output = match solvers::run(&problem, &solver) {
        Ok(o) => o,
        Err(Error::NumericFailure { message, partial }) => {
            if let Some(p) = &partial {
                fs::create_dir_all(out_dir)?;
                if p.trace.records.len() >= 2 {
                    let _ = emit(out_dir, config, &solver, p);
                } else {
                    write_trace_csv(&out_dir.join(TRACE_FILE), &p.trace, None)?;
                }
            }
            return Err(Error::NumericFailure { message, partial });
        }
        Err(e) => return Err(e),
    };
    let report = emit(out_dir, config, &solver, &output)?;
    let exit_code = if report.passed(config.run.expect_divergence) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(RunSummary {
        report,
        output,
        exit_code,
    })
}

/// `run`: returns the process exit code.
pub fn cmd_run(config_path: &Path, out_dir: &Path) -> i32 {
    let result = RunConfig::load(config_path).and_then(|c| execute(&c, out_dir));
    match result {
        Ok(s) => {
            println!(
                "{} steps, verdict {:?}, {} descent / {} relative-error violations, outputs in {}",
                s.report.steps,
                s.report.verdict,
                s.report.descent_violations.len(),
                s.report.relerr_violations.len(),
                out_dir.display()
            );
            s.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub path_length: f64,
    pub final_witness_norm: f64,
    pub verdict: Verdict,
}

fn sweep_dir(out_dir: &Path, alpha: f64) -> PathBuf {
    out_dir.join(format!("alpha_{alpha}"))
}

/// Runs the base config once per `α`, replacing the power-law exponent of
/// every noise stream. Outputs go to `out_dir/alpha_<α>/` and the table to
/// `out_dir/sweep.csv`. `parallel > 1` runs on that many threads; the table
/// keeps the input order.
pub fn alpha_sweep(base: &RunConfig, alphas: &[f64], out_dir: &Path, parallel: usize) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("alpha list is empty".into()));
    }
    let with_alpha = |s: &NoiseSchedule, alpha: f64| -> Result<NoiseSchedule> {
        match s.kind {
            NoiseKind::PowerLaw { c, .. } => Ok(NoiseSchedule {
                kind: NoiseKind::PowerLaw { c, alpha },
                ..s.clone()
            }),
            _ => Err(Error::InvalidConfig("alpha sweep needs a power_law noise schedule".into())),
        }
    };
    let configs: Vec<(f64, RunConfig)> = alphas
        .iter()
        .map(|&alpha| {
            let mut c = base.clone();
            c.noise = with_alpha(&base.noise, alpha)?;
            if let Some(y) = &base.noise_y {
                c.noise_y = Some(with_alpha(y, alpha)?);
            }
            Ok((alpha, c))
        })
        .collect::<Result<_>>()?;
    let one = |(alpha, c): &(f64, RunConfig)| -> Result<SweepRow> {
        let s = execute(c, &sweep_dir(out_dir, *alpha))?;
        Ok(SweepRow {
            alpha: *alpha,
            path_length: s.report.path_length,
            final_witness_norm: s.report.final_witness_norm,
            verdict: s.report.verdict,
        })
    };
    let rows: Vec<SweepRow> = if parallel > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| configs.par_iter().map(one).collect::<Result<_>>())?
    } else {
        configs.iter().map(one).collect::<Result<_>>()?
    };
    fs::create_dir_all(out_dir)?;
    let mut w = csv::Writer::from_path(out_dir.join("sweep.csv")).map_err(csv_io)?;
    w.write_record(["alpha", "path_length", "final_witness_norm", "verdict"])
        .map_err(csv_io)?;
    for r in &rows {
        let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
        w.write_record([
            r.alpha.to_string(),
            fmt(r.path_length),
            fmt(r.final_witness_norm),
            verdict.as_str().unwrap_or_default().to_owned(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(rows)
}

pub fn cmd_alpha_sweep(config_path: &Path, alphas: &[f64], out_dir: &Path, parallel: usize) -> i32 {
    match RunConfig::load(config_path).and_then(|c| alpha_sweep(&c, alphas, out_dir, parallel)) {
        Ok(rows) => {
            println!("alpha,path_length,final_witness_norm,verdict");
            for r in rows {
                println!("{},{:.6},{:.3e},{:?}", r.alpha, r.path_length, r.final_witness_norm, r.verdict);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `(θ, c(θ))` on `points` uniform grid points of `[theta_min, theta_max]`.
pub fn ctheta_table(theta_min: f64, theta_max: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if !(theta_min > 1.0 && theta_min < theta_max && theta_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 < theta_min < theta_max, got {theta_min}, {theta_max}"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidArgument("need at least 2 points".into()));
    }
    let step = (theta_max - theta_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let theta = if i + 1 == points {
                theta_max
            } else {
                theta_min + step * i as f64
            };
            Ok((theta, c_theta(theta)?))
        })
        .collect()
}

pub fn ctheta_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("theta,c_theta\n");
    for (t, c) in rows {
        s.push_str(&format!("{},{}\n", fmt(*t), fmt(*c)));
    }
    s
}

pub fn cmd_ctheta(theta_min: f64, theta_max: f64, points: usize, out: Option<&Path>) -> i32 {
    match ctheta_table(theta_min, theta_max, points) {
        Ok(rows) => {
            let csv = ctheta_csv(&rows);
            match out {
                Some(p) => {
                    if let Err(e) = fs::write(p, csv) {
                        eprintln!("error: {e}");
                        return EXIT_USAGE;
                    }
                }
                None => print!("{csv}"),
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn load_audit(path: &Path) -> Result<RunAudit> {
    let text = fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Recomputes the report of a stored run.
pub fn verify(trace_path: &Path, constants_path: &Path) -> Result<(DiagnosticsReport, bool)> {
    let audit = load_audit(constants_path)?;
    let trace = read_trace_csv(trace_path, audit.scheme)?;
    let (report, _) = full_report_with_series(&trace, &audit.constants, &audit.noise, &audit.diagnostics)?;
    Ok((report, audit.expect_divergence))
}

/// `verify`: prints the report JSON, or writes it to `out_dir/report.json`.
pub fn cmd_verify(trace_path: &Path, constants_path: &Path, out_dir: Option<&Path>) -> i32 {
    match verify(trace_path, constants_path) {
        Ok((report, expect_divergence)) => {
            let json = report_json(&report);
            match out_dir {
                Some(d) => {
                    if let Err(e) = fs::create_dir_all(d).and_then(|_| fs::write(d.join(REPORT_FILE), &json)) {
                        eprintln!("error: {e}");
                        return EXIT_USAGE;
                    }
                }
                None => print!("{json}"),
            }
            if report.passed(expect_divergence) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IPG: &str = r#"
[problem]
kind = "denoise"
target = [1.0]

[solver]
kind = "ipg"
h = { fraction = 0.5 }
max_iters = 50

[noise]
kind = "zero"
direction = "adversarial_positive"
"#;

    #[test]
    fn parses_and_resolves_fraction() {
        let c = RunConfig::from_toml(IPG).unwrap();
        let (_, s) = c.build().unwrap();
        assert_eq!(s.params, StepParams::Ipg { h: 0.5 });
        assert_eq!(c.diagnostics, DiagnosticsSettings::default());
    }

    #[test]
    fn pairing_checked() {
        let text = IPG.replace("kind = \"ipg\"\nh = { fraction = 0.5 }", "kind = \"pire\"\nmu = 0.5");
        let c = RunConfig::from_toml(&text).unwrap();
        let err = c.build().unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
    }

    #[test]
    fn unknown_section_rejected() {
        assert!(RunConfig::from_toml(&format!("{IPG}\n[extra]\nx = 1\n")).is_err());
    }

    #[test]
    fn ctheta_bounds() {
        assert!(ctheta_table(1.0, 5.0, 10).is_err());
        assert!(ctheta_table(2.0, 3.0, 1).is_err());
        let t = ctheta_table(2.0, 2.000001, 2).unwrap();
        assert!((t[0].1 - 1.5).abs() < 1e-5 && (t[1].1 - 1.5).abs() < 1e-5);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -5e-324, 1e308] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
    }
}
