//! C ABI over the `inexact-opt` solvers and diagnostics.
//!
//! Problems, runs and reports live behind opaque handles that the caller
//! frees with the matching `*_free`. Every fallible function returns an
//! [`IoStatus`]; on failure the message is kept per thread and read with
//! [`io_last_error_message`]. Structured inputs (problem specs, noise
//! schedules, step parameters, diagnostics settings) are passed as JSON or
//! TOML strings in the same format the command-line configs use.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_int};

use inexact_opt::cli::RunConfig;
use inexact_opt::diagnostics::{full_report, DiagnosticsReport, DiagnosticsSettings, Verdict};
use inexact_opt::linalg::Vector;
use inexact_opt::noise::{self, NoiseSchedule, TAIL_TOL};
use inexact_opt::oracles::{self, TiePolicy};
use inexact_opt::problems::{Problem, ProblemSpec};
use inexact_opt::solvers::{self, RunOutput, SolverConfig, StepParams};
use inexact_opt::Error;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    NumericFailure = 4,
    NotSummable = 5,
    ModelViolation = 6,
    Schema = 7,
    Io = 8,
    /// A string argument was not valid UTF-8.
    Utf8 = 9,
    /// An index or buffer length was out of range.
    OutOfRange = 10,
    /// Internal panic caught at the boundary.
    Panic = 11,
}

/// Verdict of the finite-length check.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoVerdict {
    Converged = 0,
    Diverged = 1,
    Undetermined = 2,
}

/// Tie rule of the hard-thresholding prox.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoTiePolicy {
    Keep = 0,
    Zero = 1,
}

/// Scalar fields of one trace record. Absent values are NaN: the step
/// fields on the last record and the witness on the first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoRecord {
    pub obj: f64,
    pub step_norm: f64,
    pub eta: f64,
    pub witness_norm: f64,
}

/// Constants of the descent and relative-error inequalities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub tau: usize,
}

/// Headline numbers of a diagnostics report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoReportSummary {
    pub steps: usize,
    pub descent_violations: usize,
    pub relerr_violations: usize,
    /// 1 when the Lyapunov audit ran, 0 when the noise tail diverges.
    pub lyapunov_available: c_int,
    pub lyapunov_monotone: c_int,
    pub path_length: f64,
    pub tail_path_length: f64,
    pub final_witness_norm: f64,
    pub verdict: IoVerdict,
}

/// Opaque built problem.
pub struct IoProblem(Problem);

/// Opaque completed run.
pub struct IoRun {
    output: RunOutput,
    settings: DiagnosticsSettings,
}

/// Opaque diagnostics report.
pub struct IoReport(DiagnosticsReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(IoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidArgument(_) => IoStatus::InvalidArgument,
            Error::InvalidConfig(_) => IoStatus::InvalidConfig,
            Error::NumericFailure { .. } => IoStatus::NumericFailure,
            Error::NotSummable(_) => IoStatus::NotSummable,
            Error::ModelViolation(_) => IoStatus::ModelViolation,
            Error::Schema(_) => IoStatus::Schema,
            Error::Io(_) => IoStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: IoStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

/// Runs `f` behind a panic guard and records the error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            IoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(IoStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(IoStatus::Utf8, format!("{name}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(IoStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(IoStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(IoStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_out<'a>(p: *mut f64, n: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if n == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(IoStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

fn json_err(what: &str) -> impl Fn(serde_json::Error) -> Failure + '_ {
    move |e| fail(IoStatus::Schema, format!("{what}: {e}"))
}

/// Copies `s` plus a NUL into `buf` when it fits. `needed` always receives
/// the full size including the NUL.
unsafe fn write_string(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Failure> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || len == 0 {
        return if needed.is_null() {
            Err(fail(IoStatus::NullPointer, "buf and needed are both null"))
        } else {
            Ok(())
        };
    }
    if len < n {
        return Err(fail(IoStatus::OutOfRange, format!("buffer holds {len} bytes, need {n}")));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn io_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf`. Returns the
/// size needed including the NUL, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn io_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Builds a problem from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_problem_from_json(json: *const c_char, out: *mut *mut IoProblem) -> IoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = ProblemSpec::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(IoProblem(spec.build()?)));
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle from [`io_problem_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn io_problem_free(problem: *mut IoProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Problem family name (`composite`, `block`, `reweighted`, `dc`, `admm`)
/// as a static string, or null for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
// the header generator cannot parse `c""` literals yet
#[allow(clippy::manual_c_str_literals)]
#[no_mangle]
pub unsafe extern "C" fn io_problem_family(problem: *const IoProblem) -> *const c_char {
    match problem.as_ref() {
        None => ptr::null(),
        Some(p) => match p.0.family() {
            "composite" => b"composite\0".as_ptr() as *const c_char,
            "block" => b"block\0".as_ptr() as *const c_char,
            "reweighted" => b"reweighted\0".as_ptr() as *const c_char,
            "dc" => b"dc\0".as_ptr() as *const c_char,
            _ => b"admm\0".as_ptr() as *const c_char,
        },
    }
}

/// Runs a solver on `problem`.
///
/// `params_json` is the step object, e.g. `{"kind":"ipg","h":0.5}`.
/// `noise_json` is a noise schedule; the splitting scheme uses it for both
/// streams. `initial_point` may be null for the zero start.
///
/// # Safety
/// Pointers must be valid; `initial_point` must hold `initial_len` values.
#[no_mangle]
pub unsafe extern "C" fn io_run_solver(
    problem: *const IoProblem,
    params_json: *const c_char,
    max_iters: usize,
    noise_json: *const c_char,
    initial_point: *const f64,
    initial_len: usize,
    out: *mut *mut IoRun,
) -> IoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let problem = ref_arg(problem, "problem")?;
        let params: StepParams = serde_json::from_str(str_arg(params_json, "params_json")?).map_err(json_err("params"))?;
        let noise: NoiseSchedule = serde_json::from_str(str_arg(noise_json, "noise_json")?).map_err(json_err("noise"))?;
        let mut config = SolverConfig::new(params, max_iters, noise);
        if !initial_point.is_null() {
            config = config.with_initial_point(slice_arg(initial_point, initial_len, "initial_point")?.to_vec());
        }
        let output = solvers::run(&problem.0, &config)?;
        *out = Box::into_raw(Box::new(IoRun {
            output,
            settings: DiagnosticsSettings::default(),
        }));
        Ok(())
    })
}

/// Runs the experiment described by a TOML config, in the format read by
/// the `run` command. The run keeps the config's diagnostics settings.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_run_from_toml(toml: *const c_char, out: *mut *mut IoRun) -> IoStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let config = RunConfig::from_toml(str_arg(toml, "toml")?)?;
        let (problem, solver) = config.build()?;
        let output = solvers::run(&problem, &solver)?;
        *out = Box::into_raw(Box::new(IoRun {
            output,
            settings: config.diagnostics,
        }));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn io_run_free(run: *mut IoRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of completed steps; the trace holds one more record.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn io_run_steps(run: *const IoRun, out: *mut usize) -> IoStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(run, "run")?.output.trace.steps();
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_run_constants(run: *const IoRun, out: *mut IoConstants) -> IoStatus {
    guard(|| {
        let c = ref_arg(run, "run")?.output.constants;
        *out_arg(out, "out")? = IoConstants {
            a: c.a,
            b: c.b,
            c: c.c,
            d: c.d,
            tau: c.tau,
        };
        Ok(())
    })
}

/// Record `k`, for `k` in `0..=steps`.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_run_record(run: *const IoRun, k: usize, out: *mut IoRecord) -> IoStatus {
    guard(|| {
        let trace = &ref_arg(run, "run")?.output.trace;
        let out = out_arg(out, "out")?;
        let r = trace
            .records
            .get(k)
            .ok_or_else(|| fail(IoStatus::OutOfRange, format!("record {k} of {}", trace.records.len())))?;
        *out = IoRecord {
            obj: r.obj,
            step_norm: r.step_norm.unwrap_or(f64::NAN),
            eta: r.eta.unwrap_or(f64::NAN),
            witness_norm: r.witness_norm.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Copies the iterate of record `k` into `buf`. `needed` receives its
/// length; pass a null `buf` to query it.
///
/// # Safety
/// `buf` must be null or hold `len` values; `needed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn io_run_point(
    run: *const IoRun,
    k: usize,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> IoStatus {
    guard(|| {
        let trace = &ref_arg(run, "run")?.output.trace;
        let x = &trace
            .records
            .get(k)
            .ok_or_else(|| fail(IoStatus::OutOfRange, format!("record {k} of {}", trace.records.len())))?
            .x;
        if let Some(n) = needed.as_mut() {
            *n = x.len();
        }
        if buf.is_null() {
            return Ok(());
        }
        if len < x.len() {
            return Err(fail(IoStatus::OutOfRange, format!("buffer holds {len} values, need {}", x.len())));
        }
        slice_out(buf, x.len(), "buf")?.copy_from_slice(x);
        Ok(())
    })
}

/// Runs every diagnostic on a run. `settings_json` may be null for the
/// run's own settings; otherwise missing fields take their defaults.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_run_report(
    run: *const IoRun,
    settings_json: *const c_char,
    out: *mut *mut IoReport,
) -> IoStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let out = out_arg(out, "out")?;
        let settings = if settings_json.is_null() {
            run.settings
        } else {
            serde_json::from_str(str_arg(settings_json, "settings_json")?).map_err(json_err("settings"))?
        };
        let o = &run.output;
        let report = full_report(&o.trace, &o.constants, &o.noise, &settings)?;
        *out = Box::into_raw(Box::new(IoReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn io_report_free(report: *mut IoReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_report_summary(report: *const IoReport, out: *mut IoReportSummary) -> IoStatus {
    guard(|| {
        let r = &ref_arg(report, "report")?.0;
        *out_arg(out, "out")? = IoReportSummary {
            steps: r.steps,
            descent_violations: r.descent_violations.len(),
            relerr_violations: r.relerr_violations.len(),
            lyapunov_available: r.lyapunov.is_some() as c_int,
            lyapunov_monotone: r.lyapunov.as_ref().is_some_and(|l| l.monotone) as c_int,
            path_length: r.path_length,
            tail_path_length: r.tail_path_length,
            final_witness_norm: r.final_witness_norm,
            verdict: match r.verdict {
                Verdict::Converged => IoVerdict::Converged,
                Verdict::Diverged => IoVerdict::Diverged,
                Verdict::Undetermined => IoVerdict::Undetermined,
            },
        };
        Ok(())
    })
}

/// Writes the report JSON (as stored in `report.json`) into `buf`. `needed`
/// receives the size including the NUL; pass a null `buf` to query it.
///
/// # Safety
/// `buf` must be null or hold `len` bytes; `needed` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn io_report_json(
    report: *const IoReport,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> IoStatus {
    guard(|| {
        let json = inexact_opt::cli::report_json(&ref_arg(report, "report")?.0);
        write_string(&json, buf, len, needed)
    })
}

/// Soft thresholding of `n` values.
///
/// # Safety
/// `x` and `out` must hold `n` values; they may alias.
#[no_mangle]
pub unsafe extern "C" fn io_prox_l1(x: *const f64, n: usize, tau: f64, out: *mut f64) -> IoStatus {
    guard(|| {
        let v = Vector::from(slice_arg(x, n, "x")?.to_vec());
        check_tau(tau)?;
        slice_out(out, n, "out")?.copy_from_slice(oracles::prox_l1(&v, tau).as_slice().expect("contiguous"));
        Ok(())
    })
}

/// Hard thresholding of `n` values; `tie` is an [`IoTiePolicy`] value.
///
/// # Safety
/// `x` and `out` must hold `n` values; they may alias.
#[no_mangle]
pub unsafe extern "C" fn io_prox_l0(x: *const f64, n: usize, tau: f64, tie: c_int, out: *mut f64) -> IoStatus {
    guard(|| {
        let v = Vector::from(slice_arg(x, n, "x")?.to_vec());
        check_tau(tau)?;
        let tie = match tie {
            t if t == IoTiePolicy::Keep as c_int => TiePolicy::Keep,
            t if t == IoTiePolicy::Zero as c_int => TiePolicy::Zero,
            t => return Err(fail(IoStatus::InvalidArgument, format!("unknown tie policy {t}"))),
        };
        slice_out(out, n, "out")?.copy_from_slice(oracles::prox_l0(&v, tau, tie).as_slice().expect("contiguous"));
        Ok(())
    })
}

/// Per-coordinate soft thresholding with thresholds `tau·weights[i]`.
///
/// # Safety
/// `x`, `weights` and `out` must hold `n` values; `out` may alias `x`.
#[no_mangle]
pub unsafe extern "C" fn io_prox_weighted_l1(
    x: *const f64,
    weights: *const f64,
    n: usize,
    tau: f64,
    out: *mut f64,
) -> IoStatus {
    guard(|| {
        let v = Vector::from(slice_arg(x, n, "x")?.to_vec());
        let w = Vector::from(slice_arg(weights, n, "weights")?.to_vec());
        check_tau(tau)?;
        let p = oracles::prox_weighted_l1(&v, &w, tau)?;
        slice_out(out, n, "out")?.copy_from_slice(p.as_slice().expect("contiguous"));
        Ok(())
    })
}

fn check_tau(tau: f64) -> Result<(), Failure> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(fail(IoStatus::InvalidArgument, format!("tau must be finite and ≥ 0, got {tau}")))
    }
}

fn schedule(json: *const c_char) -> Result<NoiseSchedule, Failure> {
    let s: NoiseSchedule =
        serde_json::from_str(unsafe { str_arg(json, "schedule_json")? }).map_err(json_err("schedule"))?;
    s.validate()?;
    Ok(s)
}

/// `η_k` of a noise schedule given as JSON.
///
/// # Safety
/// `schedule_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_noise_eta(schedule_json: *const c_char, k: u64, out: *mut f64) -> IoStatus {
    guard(|| {
        *out_arg(out, "out")? = schedule(schedule_json)?.eta(k)?;
        Ok(())
    })
}

/// `Σ_{l ≥ k} η_l²`; fails with `NotSummable` for a divergent tail.
///
/// # Safety
/// `schedule_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_noise_tail_sum_sq(schedule_json: *const c_char, k: u64, out: *mut f64) -> IoStatus {
    guard(|| {
        *out_arg(out, "out")? = schedule(schedule_json)?.tail_sum_sq(k, TAIL_TOL)?;
        Ok(())
    })
}

/// Noise vector `eᵏ` of dimension `n`.
///
/// # Safety
/// `schedule_json` must be a NUL-terminated string; `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn io_noise_draw(schedule_json: *const c_char, k: u64, n: usize, out: *mut f64) -> IoStatus {
    guard(|| {
        let e = schedule(schedule_json)?.draw_noise(k, n)?;
        slice_out(out, n, "out")?.copy_from_slice(e.as_slice().expect("contiguous"));
        Ok(())
    })
}

/// `c(θ) = (2θ − 1)/(2(θ − 1))` for `θ > 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn io_c_theta(theta: f64, out: *mut f64) -> IoStatus {
    guard(|| {
        *out_arg(out, "out")? = noise::c_theta(theta)?;
        Ok(())
    })
}
