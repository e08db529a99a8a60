use super::*;
use crate::problems::DcProblem;

/// Inexact proximal DC step: `x⁺ = prox_{γg}(x − γ(∇f(x) − ∇h(x)) + eᵏ)`.
///
/// Only `L_f` limits the step, which admits steps well above
/// `1/(L_f + L_h)`.
pub fn run_idc(problem: &DcProblem, config: &SolverConfig) -> Result<RunOutput> {
    let StepParams::Dc { gamma } = config.params else {
        return Err(wrong_params(Scheme::Dc, &config.params));
    };
    config.check_common()?;
    let noise = config.single_noise()?;
    let l_f = problem.f.lipschitz();
    let l_h = problem.h.lipschitz();
    check_positive("gamma", gamma)?;
    if gamma * l_f >= 2.0 {
        return Err(Error::InvalidConfig(format!(
            "need 0 < gamma < 2/L_f = {}, got {gamma}",
            2.0 / l_f
        )));
    }
    let constants = LemmaConstants {
        a: (1.0 / gamma - l_f / 2.0) / 2.0,
        b: 1.0 / (gamma * (2.0 - gamma * l_f)),
        c: 1.0 / gamma + l_f + l_h,
        d: 1.0 / gamma,
        tau: 0,
    };
    let grad = |x: &Vector| problem.f.grad(x) - problem.h.grad(x);
    let n = problem.dimension;
    let mut x = config.start_point(n)?;
    let mut rec = Recorder::start(Scheme::Dc, config.max_iters, config.stop_tol, &x, problem.objective(&x));
    if let Err(m) = rec.check_start() {
        return Err(rec.fail(m, constants, config.noise.clone()));
    }
    while rec.running() {
        let k = rec.steps();
        let e = noise.draw_for_step(k, n)?;
        let eta = noise.eta_for_step(k);
        let v = forward_step(&x, &grad(&x), gamma, &e);
        let next = problem.g.prox(&v, gamma);
        // ∇f(x⁺) − ∇h(x⁺) + ∂g(x⁺)
        let witness = prox_witness(&v, &next, gamma, &grad(&next));
        let obj = problem.objective(&next);
        if let Err(m) = rec.push(linalg::dist(&x, &next), eta, None, &next, obj, linalg::norm(&witness)) {
            return Err(rec.fail(m, constants, config.noise.clone()));
        }
        x = next;
    }
    Ok(rec.finish(constants, config.noise.clone()))
}
