use std::ffi::{CStr, CString};
use std::ptr;

use inexact_opt_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        let n = io_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0u8; n.max(1)];
        io_last_error_message(buf.as_mut_ptr() as *mut _, buf.len());
        CStr::from_bytes_until_nul(&buf).unwrap().to_string_lossy().into_owned()
    }
}

const DENOISE: &str = r#"{"kind":"denoise","target":[1.0,-2.0],"reg_weight":0.1}"#;
const IPG: &str = r#"{"kind":"ipg","h":0.5}"#;
const NOISE: &str = r#"{"kind":"power_law","c":0.1,"alpha":2.0,"direction":"random_sphere","seed":3}"#;

unsafe fn denoise_run(iters: usize) -> *mut IoRun {
    let mut problem = ptr::null_mut();
    assert_eq!(io_problem_from_json(cstr(DENOISE).as_ptr(), &mut problem), IoStatus::Ok);
    assert_eq!(CStr::from_ptr(io_problem_family(problem)).to_str().unwrap(), "composite");
    let mut run = ptr::null_mut();
    let status = io_run_solver(
        problem,
        cstr(IPG).as_ptr(),
        iters,
        cstr(NOISE).as_ptr(),
        ptr::null(),
        0,
        &mut run,
    );
    assert_eq!(status, IoStatus::Ok, "{}", last_error());
    io_problem_free(problem);
    run
}

#[test]
fn solve_and_report() {
    unsafe {
        let run = denoise_run(300);
        let mut steps = 0;
        assert_eq!(io_run_steps(run, &mut steps), IoStatus::Ok);
        assert_eq!(steps, 300);

        let mut c = IoConstants { a: 0.0, b: 0.0, c: 0.0, d: 0.0, tau: 9 };
        assert_eq!(io_run_constants(run, &mut c), IoStatus::Ok);
        assert_eq!((c.a, c.b, c.c, c.d, c.tau), (0.25, 4.0, 3.0, 2.0, 0));

        let mut first = IoRecord { obj: 0.0, step_norm: 0.0, eta: 0.0, witness_norm: 0.0 };
        assert_eq!(io_run_record(run, 0, &mut first), IoStatus::Ok);
        assert!(first.witness_norm.is_nan() && first.step_norm > 0.0);
        let mut last = first;
        assert_eq!(io_run_record(run, 300, &mut last), IoStatus::Ok);
        assert!(last.step_norm.is_nan() && last.eta.is_nan());
        assert_eq!(io_run_record(run, 301, &mut last), IoStatus::OutOfRange);

        let mut n = 0;
        assert_eq!(io_run_point(run, 300, ptr::null_mut(), 0, &mut n), IoStatus::Ok);
        assert_eq!(n, 2);
        let mut x = [0.0; 2];
        assert_eq!(io_run_point(run, 300, x.as_mut_ptr(), 2, ptr::null_mut()), IoStatus::Ok);
        assert!((x[0] - 0.9).abs() < 1e-5 && (x[1] + 1.9).abs() < 1e-5, "{x:?}");

        let mut report = ptr::null_mut();
        assert_eq!(io_run_report(run, ptr::null(), &mut report), IoStatus::Ok);
        let mut s = std::mem::zeroed::<IoReportSummary>();
        assert_eq!(io_report_summary(report, &mut s), IoStatus::Ok);
        assert_eq!((s.steps, s.descent_violations, s.relerr_violations), (300, 0, 0));
        assert_eq!((s.lyapunov_available, s.lyapunov_monotone), (1, 1));

        let mut needed = 0;
        assert_eq!(io_report_json(report, ptr::null_mut(), 0, &mut needed), IoStatus::Ok);
        let mut small = vec![0 as libc::c_char; 8];
        assert_eq!(io_report_json(report, small.as_mut_ptr(), 8, ptr::null_mut()), IoStatus::OutOfRange);
        let mut buf = vec![0u8; needed];
        assert_eq!(io_report_json(report, buf.as_mut_ptr() as *mut _, needed, ptr::null_mut()), IoStatus::Ok);
        let json = CStr::from_bytes_with_nul(&buf).unwrap().to_str().unwrap();
        let parsed = inexact_opt::diagnostics::DiagnosticsReport::from_json(json).unwrap();
        assert_eq!(parsed.steps, 300);

        let mut strict = ptr::null_mut();
        let settings = cstr(r#"{"window": 10, "cauchy_tol": 1e-3, "witness_tol": 1e-3}"#);
        assert_eq!(io_run_report(run, settings.as_ptr(), &mut strict), IoStatus::Ok);
        assert_eq!(io_report_summary(strict, &mut s), IoStatus::Ok);
        assert_eq!(s.verdict, IoVerdict::Converged);

        io_report_free(strict);
        io_report_free(report);
        io_run_free(run);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(io_problem_from_json(cstr("{\"kind\":\"nope\"}").as_ptr(), &mut problem), IoStatus::Schema);
        assert!(last_error().contains("schema"));
        assert!(problem.is_null());
        assert_eq!(io_problem_from_json(ptr::null(), &mut problem), IoStatus::NullPointer);

        let bad = [0xffu8, 0];
        assert_eq!(io_problem_from_json(bad.as_ptr() as *const _, &mut problem), IoStatus::Utf8);

        // pairing a reweighted scheme with a composite problem
        assert_eq!(io_problem_from_json(cstr(DENOISE).as_ptr(), &mut problem), IoStatus::Ok);
        assert_eq!(last_error(), "");
        let mut run = ptr::null_mut();
        let status = io_run_solver(
            problem,
            cstr(r#"{"kind":"pire","mu":0.5}"#).as_ptr(),
            10,
            cstr(NOISE).as_ptr(),
            ptr::null(),
            0,
            &mut run,
        );
        assert_eq!(status, IoStatus::InvalidConfig);
        assert!(last_error().contains("reweighted"));
        let start = [1.0];
        let status = io_run_solver(problem, cstr(IPG).as_ptr(), 10, cstr(NOISE).as_ptr(), start.as_ptr(), 1, &mut run);
        assert_eq!(status, IoStatus::InvalidConfig);
        io_problem_free(problem);
        io_problem_free(ptr::null_mut());
        io_run_free(ptr::null_mut());
        io_report_free(ptr::null_mut());
        assert!(io_problem_family(ptr::null()).is_null());
    }
}

#[test]
fn toml_run_matches_handle_run() {
    let toml = r#"
[problem]
kind = "denoise"
target = [1.0, -2.0]
reg_weight = 0.1

[solver]
kind = "ipg"
h = 0.5
max_iters = 300

[noise]
kind = "power_law"
c = 0.1
alpha = 2.0
direction = "random_sphere"
seed = 3
"#;
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(io_run_from_toml(cstr(toml).as_ptr(), &mut a), IoStatus::Ok);
        let b = denoise_run(300);
        for k in 0..=300 {
            let mut ra = std::mem::zeroed::<IoRecord>();
            let mut rb = ra;
            io_run_record(a, k, &mut ra);
            io_run_record(b, k, &mut rb);
            assert_eq!(ra.obj.to_bits(), rb.obj.to_bits());
            assert_eq!(ra.witness_norm.to_bits(), rb.witness_norm.to_bits());
        }
        io_run_free(a);
        io_run_free(b);
        let mut c = ptr::null_mut();
        assert_eq!(io_run_from_toml(cstr("[problem]").as_ptr(), &mut c), IoStatus::InvalidConfig);
    }
}

#[test]
fn blow_up_maps_to_numeric_status() {
    let toml = r#"
[problem]
kind = "denoise"
target = [1.0]

[solver]
kind = "ipg"
h = 0.5
max_iters = 5000

[noise]
kind = "constant"
c = 1e300
direction = "adversarial_positive"
"#;
    unsafe {
        let mut run = ptr::null_mut();
        assert_eq!(io_run_from_toml(cstr(toml).as_ptr(), &mut run), IoStatus::NumericFailure);
        assert!(run.is_null());
        assert!(last_error().contains("numeric"));
    }
}

#[test]
fn prox_functions() {
    unsafe {
        let x = [3.0, -0.5, 1.0, -2.0];
        let mut out = [0.0; 4];
        assert_eq!(io_prox_l1(x.as_ptr(), 4, 1.0, out.as_mut_ptr()), IoStatus::Ok);
        assert_eq!(out, [2.0, 0.0, 0.0, -1.0]);
        assert_eq!(io_prox_l0(x.as_ptr(), 4, 0.5, IoTiePolicy::Zero as i32, out.as_mut_ptr()), IoStatus::Ok);
        assert_eq!(out, [3.0, 0.0, 0.0, -2.0]);
        assert_eq!(io_prox_l0(x.as_ptr(), 4, 0.5, IoTiePolicy::Keep as i32, out.as_mut_ptr()), IoStatus::Ok);
        assert_eq!(out, [3.0, 0.0, 1.0, -2.0]);
        assert_eq!(io_prox_l0(x.as_ptr(), 4, 0.5, 7, out.as_mut_ptr()), IoStatus::InvalidArgument);
        let w = [1.0, 1.0, 0.5, 3.0];
        assert_eq!(io_prox_weighted_l1(x.as_ptr(), w.as_ptr(), 4, 1.0, out.as_mut_ptr()), IoStatus::Ok);
        assert_eq!(out, [2.0, 0.0, 0.5, 0.0]);
        let w = [1.0, 0.0, 1.0, 1.0];
        assert_eq!(
            io_prox_weighted_l1(x.as_ptr(), w.as_ptr(), 4, 1.0, out.as_mut_ptr()),
            IoStatus::InvalidArgument
        );
        assert_eq!(io_prox_l1(x.as_ptr(), 4, -1.0, out.as_mut_ptr()), IoStatus::InvalidArgument);
        assert_eq!(io_prox_l1(ptr::null(), 4, 1.0, out.as_mut_ptr()), IoStatus::NullPointer);
        // in place
        let mut y = x;
        assert_eq!(io_prox_l1(y.as_ptr(), 4, 1.0, y.as_mut_ptr()), IoStatus::Ok);
        assert_eq!(y, [2.0, 0.0, 0.0, -1.0]);
    }
}

#[test]
fn noise_functions() {
    let pl = cstr(r#"{"kind":"power_law","c":1.0,"alpha":2.0,"direction":"random_sphere","seed":5}"#);
    unsafe {
        let mut v = 0.0;
        assert_eq!(io_noise_eta(pl.as_ptr(), 4, &mut v), IoStatus::Ok);
        assert_eq!(v, 1.0 / 16.0);
        assert_eq!(io_noise_tail_sum_sq(pl.as_ptr(), 1, &mut v), IoStatus::Ok);
        assert!((v - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
        let mut e = [0.0; 5];
        assert_eq!(io_noise_draw(pl.as_ptr(), 2, 5, e.as_mut_ptr()), IoStatus::Ok);
        let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 0.25).abs() < 1e-15);

        let flat = cstr(r#"{"kind":"constant","c":0.1,"direction":"adversarial_positive"}"#);
        assert_eq!(io_noise_tail_sum_sq(flat.as_ptr(), 1, &mut v), IoStatus::NotSummable);
        let bad = cstr(r#"{"kind":"power_law","c":-1.0,"alpha":2.0,"direction":"adversarial_positive"}"#);
        assert_eq!(io_noise_eta(bad.as_ptr(), 1, &mut v), IoStatus::InvalidArgument);
        assert_eq!(io_noise_eta(pl.as_ptr(), 0, &mut v), IoStatus::InvalidArgument);

        assert_eq!(io_c_theta(2.0, &mut v), IoStatus::Ok);
        assert_eq!(v, 1.5);
        assert_eq!(io_c_theta(1.0, &mut v), IoStatus::InvalidArgument);
        assert!(!CStr::from_ptr(io_version()).to_str().unwrap().is_empty());
    }
}
