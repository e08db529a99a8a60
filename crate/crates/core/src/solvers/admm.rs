use super::*;
use crate::problems::AdmmProblem;

/// Inexact splitting for `min f(x) + g(y)` s.t. `x + y = 0`:
///
/// `x⁺ = prox_{f/(α+β)}((αx − βy − γ)/(α+β) + e₁)`,
/// `y⁺ = prox_{g/β}(−x⁺ − γ/β + e₂)`,
/// `γ⁺ = γ + β(x⁺ + y⁺)`.
///
/// The objective is the augmented Lagrangian and the recorded `η` is the norm
/// of `εᵏ = (e₂ᵏ⁺¹ − e₂ᵏ, e₁ᵏ⁺¹, e₂ᵏ⁺¹)`. The run starts from `y⁰ = 0` and
/// `γ⁰ = −∇g(y⁰)`, the dual value the y-step optimality condition would
/// produce with `e₂⁰ = 0`, so the dual-step bound holds from the first step.
pub fn run_iadmm(problem: &AdmmProblem, config: &SolverConfig) -> Result<RunOutput> {
    let StepParams::Admm { alpha, beta } = config.params else {
        return Err(wrong_params(Scheme::Admm, &config.params));
    };
    config.check_common()?;
    let NoiseModel::Pair { x: noise_x, y: noise_y } = &config.noise else {
        return Err(Error::InvalidConfig("the splitting scheme takes a pair of noise schedules".into()));
    };
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    let l_g = problem.g.lipschitz();
    let beta_min = (2.0 * 2f64.sqrt() + 1.0) * l_g;
    if beta <= beta_min {
        return Err(Error::InvalidConfig(format!("need beta > (2√2 + 1)·L_g = {beta_min}, got {beta}")));
    }
    if beta < 1.0 / problem.sigma0 {
        return Err(Error::InvalidConfig(format!(
            "need beta ≥ 1/sigma0 = {}, got {beta}",
            1.0 / problem.sigma0
        )));
    }
    if !problem.g_convex {
        return Err(Error::InvalidConfig("the splitting scheme needs a convex g".into()));
    }
    let rho1 = 2.0 * l_g * l_g;
    let rho2 = 2.0 * beta * beta;
    let s = alpha + beta;
    let constants = LemmaConstants {
        a: (alpha / 4.0).min((beta - l_g) / 4.0 - rho1 / beta),
        b: (s * s / alpha).max(beta * beta / (beta - l_g)).max(rho2 / beta),
        c: alpha.max(beta) + (beta + rho1.sqrt()) + rho1.sqrt() / beta,
        d: s + rho2.sqrt().max(beta) + rho2.sqrt() / beta,
        tau: 0,
    };

    let n = problem.dimension;
    let mut x = config.start_point(n)?;
    let mut y = Vector::zeros(n);
    let mut dual = -problem.g.grad(&y);
    let mut e2_prev = Vector::zeros(n);
    let lagrangian = |x: &Vector, y: &Vector, dual: &Vector| problem.augmented_lagrangian(x, y, dual, beta);
    let stack = |x: &Vector, y: &Vector, dual: &Vector| linalg::concat(&linalg::concat(x, y), dual);

    let mut rec = Recorder::start(
        Scheme::Admm,
        config.max_iters,
        config.stop_tol,
        &stack(&x, &y, &dual),
        lagrangian(&x, &y, &dual),
    );
    if let Err(m) = rec.check_start() {
        return Err(rec.fail(m, constants, config.noise.clone()));
    }
    let mut y_step_prev = 0.0;
    while rec.running() {
        let k = rec.steps();
        let e1 = noise_x.draw_for_step(k, n)?;
        let e2 = noise_y.draw_for_step(k, n)?;

        let vx = (&x * alpha - &y * beta - &dual) / s + &e1;
        let x1 = problem.f.prox(&vx, 1.0 / s);
        let vy = -&x1 - &dual / beta + &e2;
        let y1 = problem.g.prox(&vy, 1.0 / beta);
        let r1 = &x1 + &y1;
        let dual1 = &dual + &(&r1 * beta);

        // ∂f(x⁺) ∋ s(vx − x⁺); each block adds the multiplier and penalty terms
        let wx = (&vx - &x1) * s + &dual1 + &(&r1 * beta);
        let wy = problem.g.grad(&y1) + &dual1 + &(&r1 * beta);
        let witness = (wx.dot(&wx) + wy.dot(&wy) + r1.dot(&r1)).sqrt();

        let dx = linalg::dist(&x, &x1);
        let dy = linalg::dist(&y, &y1);
        let dg = linalg::dist(&dual, &dual1);
        let de2 = linalg::dist(&e2, &e2_prev);
        let eps = (de2 * de2 + e1.dot(&e1) + e2.dot(&e2)).sqrt();
        let extras = Extras::Admm {
            dual_step: dg,
            y_step: dy,
            noise_y_diff: de2,
            // the lagged block of d moves by the previous y step
            d_step: (dx * dx + dy * dy + dg * dg + y_step_prev * y_step_prev).sqrt(),
        };
        let step = (dx * dx + dy * dy).sqrt();
        let obj = lagrangian(&x1, &y1, &dual1);
        if let Err(m) = rec.push(step, eps, Some(extras), &stack(&x1, &y1, &dual1), obj, witness) {
            return Err(rec.fail(m, constants, config.noise.clone()));
        }
        x = x1;
        y = y1;
        dual = dual1;
        e2_prev = e2;
        y_step_prev = dy;
    }
    Ok(rec.finish(constants, config.noise.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_admm_quadratic;

    #[test]
    fn constants_for_reference_parameters() {
        let p = make_admm_quadratic(1.0, 1).unwrap();
        let cfg = SolverConfig::new(StepParams::Admm { alpha: 1.0, beta: 4.0 }, 1, NoiseSchedule::zero());
        let c = run_iadmm(&p, &cfg).unwrap().constants;
        assert_eq!(c.a, 0.25);
        assert_eq!(c.b, 25.0);
    }

    #[test]
    fn exact_run_reaches_kkt_point() {
        let p = make_admm_quadratic(1.0, 1).unwrap();
        let cfg = SolverConfig::new(StepParams::Admm { alpha: 1.0, beta: 4.0 }, 300, NoiseSchedule::zero());
        let out = run_iadmm(&p, &cfg).unwrap();
        let last = out.trace.final_point().unwrap();
        assert!((last[0] + 0.5).abs() < 1e-9, "{last:?}");
        assert!((last[1] - 0.5).abs() < 1e-9);
        assert!((last[2] - 0.5).abs() < 1e-9);
        assert!((last[0] + last[1]).abs() < 1e-9);
    }

    #[test]
    fn parameter_bounds() {
        let p = make_admm_quadratic(1.0, 1).unwrap();
        for (alpha, beta) in [(1.0, 3.8), (0.0, 4.0), (1.0, 1.5)] {
            let cfg = SolverConfig::new(StepParams::Admm { alpha, beta }, 1, NoiseSchedule::zero());
            assert!(matches!(run_iadmm(&p, &cfg), Err(Error::InvalidConfig(_))), "{alpha} {beta}");
        }
    }
}
