use inexact_opt::cli::{read_trace_csv, write_trace_csv};
use inexact_opt::diagnostics::{
    check_lyapunov, check_relative_error, check_sufficient_descent, full_report, DiagnosticsReport,
    DiagnosticsSettings,
};
use inexact_opt::linalg::{self, Vector};
use inexact_opt::noise::{Direction, LyapunovParams, NoiseSchedule, TAIL_TOL};
use inexact_opt::oracles::{prox_l0, prox_l1, TiePolicy};
use inexact_opt::problems::{Problem, ProblemSpec, RegKind};
use inexact_opt::solvers::{self, RunOutput, SolverConfig, StepParams};
use proptest::prelude::*;

fn denoise_run(target: Vec<f64>, reg: f64, kind: RegKind, h: f64, c: f64, alpha: f64, seed: u64) -> RunOutput {
    let problem = ProblemSpec::Denoise {
        target,
        reg_weight: reg,
        reg_kind: kind,
    }
    .build()
    .unwrap();
    let noise = NoiseSchedule::power_law(c, alpha, Direction::RandomSphere { seed });
    solvers::run(&problem, &SolverConfig::new(StepParams::Ipg { h }, 150, noise)).unwrap()
}

fn target() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn soft_threshold_is_nonexpansive(a in -10.0..10.0f64, b in -10.0..10.0f64, tau in 0.0..3.0f64) {
        let pa = prox_l1(&Vector::from(vec![a]), tau)[0];
        let pb = prox_l1(&Vector::from(vec![b]), tau)[0];
        prop_assert!((pa - pb).abs() <= (a - b).abs() + 1e-15);
        prop_assert!(pa.abs() <= a.abs());
    }

    #[test]
    fn soft_threshold_beats_perturbations(x in -10.0..10.0f64, tau in 0.0..3.0f64, d in -1.0..1.0f64) {
        let z = prox_l1(&Vector::from(vec![x]), tau)[0];
        let model = |y: f64| tau * y.abs() + 0.5 * (y - x) * (y - x);
        prop_assert!(model(z) <= model(z + d) + 1e-12);
    }

    #[test]
    fn hard_threshold_picks_cheaper_candidate(x in -10.0..10.0f64, tau in 0.0..5.0f64) {
        let z = prox_l0(&Vector::from(vec![x]), tau, TiePolicy::Zero)[0];
        prop_assert!(z == 0.0 || z == x);
        let cost = |y: f64| if y != 0.0 { tau } else { 0.0 } + 0.5 * (y - x) * (y - x);
        prop_assert!(cost(z) <= cost(0.0).min(cost(x)));
    }

    #[test]
    fn noise_vectors_have_scheduled_norm(
        c in 0.0..10.0f64, alpha in 0.1..3.0f64, k in 1u64..10_000, n in 1usize..20, seed in any::<u64>()
    ) {
        let s = NoiseSchedule::power_law(c, alpha, Direction::RandomSphere { seed });
        let e = s.draw_noise(k, n).unwrap();
        let eta = s.eta(k).unwrap();
        prop_assert!((linalg::norm(&e) - eta).abs() <= 1e-12 * (1.0 + eta));
        prop_assert_eq!(e, s.draw_noise(k, n).unwrap());
    }

    #[test]
    fn tail_sums_decrease(c in 0.1..5.0f64, alpha in 0.6..3.0f64, from in 1u64..500) {
        let s = NoiseSchedule::power_law(c, alpha, Direction::AdversarialPositive);
        let tails = s.tail_sums_sq(from, 50, TAIL_TOL).unwrap();
        for w in tails.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let direct = s.tail_sum_sq(from + 10, TAIL_TOL).unwrap();
        prop_assert!((tails[10] - direct).abs() <= 1e-10 * direct.max(1e-300) + 1e-13);
    }

    #[test]
    fn inexact_steps_satisfy_both_inequalities(
        t in target(), reg in 0.0..1.0f64, l0 in any::<bool>(), frac in 0.05..0.95f64,
        c in 0.0..2.0f64, alpha in 0.6..3.0f64, seed in any::<u64>()
    ) {
        let kind = if l0 { RegKind::L0 } else { RegKind::L1 };
        let out = denoise_run(t, reg, kind, frac, c, alpha, seed);
        let d = check_sufficient_descent(&out.trace, &out.constants, 1e-9).unwrap();
        let r = check_relative_error(&out.trace, &out.constants, 1e-9).unwrap();
        prop_assert!(d.is_empty(), "descent {:?}", d.first());
        prop_assert!(r.is_empty(), "relative error {:?}", r.first());
    }

    #[test]
    fn lyapunov_value_is_monotone(t in target(), c in 0.0..2.0f64, alpha in 0.6..3.0f64, seed in any::<u64>()) {
        let out = denoise_run(t, 0.2, RegKind::L1, 0.5, c, alpha, seed);
        let params = LyapunovParams::new(2.0, out.constants.b).unwrap();
        let l = check_lyapunov(&out.trace, &out.noise, &params, &out.constants, 1e-9).unwrap();
        prop_assert!(l.monotone);
        prop_assert!(l.identity_max_error <= 1e-12);
        prop_assert_eq!(l.reconciled_increases, l.obj_increases);
    }

    #[test]
    fn runs_are_deterministic(t in target(), seed in any::<u64>()) {
        let a = denoise_run(t.clone(), 0.3, RegKind::L0, 0.7, 0.5, 1.5, seed);
        let b = denoise_run(t, 0.3, RegKind::L0, 0.7, 0.5, 1.5, seed);
        prop_assert_eq!(a.trace, b.trace);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn report_and_trace_round_trip(t in target(), c in 0.0..2.0f64, alpha in 0.6..3.0f64, seed in any::<u64>()) {
        let out = denoise_run(t, 0.1, RegKind::L1, 0.6, c, alpha, seed);
        let report = full_report(&out.trace, &out.constants, &out.noise, &DiagnosticsSettings::default()).unwrap();
        prop_assert_eq!(&DiagnosticsReport::from_json(&report.to_json()).unwrap(), &report);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, &out.trace, None).unwrap();
        let back = read_trace_csv(&path, out.trace.scheme).unwrap();
        prop_assert_eq!(back.records.len(), out.trace.records.len());
        for (a, b) in back.records.iter().zip(&out.trace.records) {
            prop_assert_eq!(a.obj, b.obj);
            prop_assert_eq!(a.step_norm, b.step_norm);
            prop_assert_eq!(a.eta, b.eta);
            prop_assert_eq!(a.witness_norm, b.witness_norm);
        }
        let again = full_report(&back, &out.constants, &out.noise, &DiagnosticsSettings::default()).unwrap();
        prop_assert_eq!(again, report);
    }
}

#[test]
fn shipped_problems_rebuild_identically() {
    let spec = ProblemSpec::SparseRegression {
        n_rows: 15,
        n_cols: 8,
        sparsity: 2,
        reg_weight: 0.1,
        reg_kind: RegKind::L1,
        seed: 4,
    };
    let (Problem::Composite(a), Problem::Composite(b)) = (spec.build().unwrap(), spec.build().unwrap()) else {
        panic!("sparse regression builds a composite problem");
    };
    let x = Vector::from_shape_fn(8, |i| i as f64 * 0.1);
    assert_eq!(a.objective(&x), b.objective(&x));
    assert_eq!(a.f.grad(&x), b.f.grad(&x));
    assert_eq!(ProblemSpec::from_json(&spec.to_json()).unwrap(), spec);
}
