use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

use inexact_opt::diagnostics::check_sufficient_descent;
use inexact_opt::linalg::Vector;
use inexact_opt::noise::{Direction, NoiseSchedule};
use inexact_opt::problems::{make_block_coupling, make_sparse_regression, LeastSquares, Problem, ProblemSpec, RegKind};
use inexact_opt::solvers::{self, LemmaConstants, SolverConfig, StepParams};

#[test]
fn least_squares_lipschitz_matches_dense_eigenvalue() {
    let p = make_sparse_regression(40, 20, 4, 0.1, RegKind::L1, 7).unwrap();
    let lipschitz = p.f.lipschitz();
    // rebuild A from gradients: ∇f(eᵢ) − ∇f(0) = AᵀA eᵢ
    let n = 20;
    let g0 = p.f.grad(&Vector::zeros(n));
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        let col = p.f.grad(&e) - &g0;
        for j in 0..n {
            gram[(j, i)] = col[j];
        }
    }
    let sym = (&gram + gram.transpose()) * 0.5;
    let lmax = sym.symmetric_eigenvalues().max();
    assert_relative_eq!(lipschitz, lmax, max_relative = 1e-7);
}

#[test]
fn least_squares_gradient_matches_dense_formula() {
    let a = ndarray::Array2::from_shape_fn((6, 3), |(i, j)| ((i * 3 + j) as f64).sin());
    let y = Vector::from_shape_fn(6, |i| i as f64 - 2.0);
    let f = LeastSquares::new(a.clone(), y.clone());
    let am = DMatrix::from_fn(6, 3, |i, j| a[(i, j)]);
    let ym = DVector::from_fn(6, |i, _| y[i]);
    let x = Vector::from(vec![0.3, -1.1, 2.0]);
    let xm = DVector::from_fn(3, |i, _| x[i]);
    let expected = am.transpose() * (&am * &xm - &ym);
    let g = inexact_opt::problems::SmoothFn::grad(&f, &x);
    for i in 0..3 {
        assert_relative_eq!(g[i], expected[i], max_relative = 1e-12);
    }
}

fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

#[test]
fn exact_palm_matches_reference_loop() {
    let (dim, kappa, reg, gamma, lambda) = (6, 1.0, 0.1, 0.5, 0.25);
    let problem = make_block_coupling(dim, kappa, reg, RegKind::L1, 7).unwrap();
    // ∇_z H(0, 0) = −κ·anchor
    let g0 = problem.coupling.grad(&Vector::zeros(2 * dim));
    let anchor: Vec<f64> = (0..dim).map(|i| -g0[dim + i] / kappa).collect();

    let cfg = SolverConfig::new(StepParams::Palm { gamma, lambda }, 300, NoiseSchedule::zero());
    let out = solvers::run(&Problem::Block(problem), &cfg).unwrap();

    let (mut y, mut z) = (vec![0.0; dim], vec![0.0; dim]);
    for _ in 0..300 {
        for i in 0..dim {
            y[i] = soft(y[i] - gamma * (y[i] - z[i]), gamma * reg);
        }
        for i in 0..dim {
            z[i] -= lambda * (-(y[i] - z[i]) + kappa * (z[i] - anchor[i]));
        }
    }
    let last = out.trace.final_point().unwrap();
    for i in 0..dim {
        assert_relative_eq!(last[i], y[i], epsilon = 1e-12);
        assert_relative_eq!(last[dim + i], z[i], epsilon = 1e-12);
    }
}

#[test]
fn smooth_witness_is_the_gradient() {
    let target = vec![1.0, -2.0, 0.5];
    let problem = ProblemSpec::Denoise {
        target: target.clone(),
        reg_weight: 0.0,
        reg_kind: RegKind::L1,
    }
    .build()
    .unwrap();
    let noise = NoiseSchedule::power_law(0.3, 1.5, Direction::RandomSphere { seed: 1 });
    let out = solvers::run(&problem, &SolverConfig::new(StepParams::Ipg { h: 0.4 }, 50, noise)).unwrap();
    for r in &out.trace.records[1..] {
        let grad: f64 = r.x.iter().zip(&target).map(|(x, t)| (x - t).powi(2)).sum::<f64>().sqrt();
        assert_relative_eq!(r.witness_norm.unwrap(), grad, max_relative = 1e-12, epsilon = 1e-15);
    }
}

#[test]
fn inflated_descent_constant_is_caught() {
    let problem = ProblemSpec::Denoise {
        target: vec![1.0],
        reg_weight: 0.0,
        reg_kind: RegKind::L1,
    }
    .build()
    .unwrap();
    let out = solvers::run(&problem, &SolverConfig::new(StepParams::Ipg { h: 0.5 }, 20, NoiseSchedule::zero())).unwrap();
    assert!(check_sufficient_descent(&out.trace, &out.constants, 1e-9).unwrap().is_empty());
    // exact decrease here is 1.5·step², so a = 2 must fail
    let inflated = LemmaConstants { a: 2.0, ..out.constants };
    let v = check_sufficient_descent(&out.trace, &inflated, 1e-9).unwrap();
    // late steps shrink below the tolerance, the early ones cannot hide
    assert!(v.len() >= 10, "{v:?}");
    assert_eq!(v[0].k, 0);
}

#[test]
fn splitting_starts_from_consistent_dual() {
    let problem = ProblemSpec::AdmmQuadratic { target: 1.0, dimension: 1 }.build().unwrap();
    let cfg = SolverConfig::new(StepParams::Admm { alpha: 1.0, beta: 4.0 }, 3, NoiseSchedule::zero());
    let out = solvers::run(&problem, &cfg).unwrap();
    // (x, y, γ) with γ⁰ = −∇g(0) = target
    assert_eq!(out.trace.records[0].x, vec![0.0, 0.0, 1.0]);
}

#[test]
fn stop_tolerance_ends_run_early() {
    let problem = ProblemSpec::Denoise {
        target: vec![1.0, 2.0],
        reg_weight: 0.0,
        reg_kind: RegKind::L1,
    }
    .build()
    .unwrap();
    let cfg = SolverConfig::new(StepParams::Ipg { h: 0.5 }, 1000, NoiseSchedule::zero()).with_stop_tol(1e-6);
    let out = solvers::run(&problem, &cfg).unwrap();
    assert!(out.stopped_early);
    let k = out.trace.steps();
    assert!(out.trace.witness_norm(k) <= 1e-6);
    assert!(out.trace.witness_norm(k - 1) > 1e-6);
}

#[test]
fn initial_point_with_wrong_length_is_rejected() {
    let problem = ProblemSpec::Zero { dimension: 3 }.build().unwrap();
    let cfg = SolverConfig::new(StepParams::Ipg { h: 1.0 }, 5, NoiseSchedule::zero()).with_initial_point(vec![1.0]);
    assert!(matches!(solvers::run(&problem, &cfg), Err(inexact_opt::Error::InvalidConfig(_))));
}
