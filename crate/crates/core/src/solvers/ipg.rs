use super::*;
use crate::problems::CompositeProblem;

/// Inexact proximal gradient: `x⁺ = prox_{h·g}(x − h∇f(x) + eᵏ)`.
pub fn run_ipg(problem: &CompositeProblem, config: &SolverConfig) -> Result<RunOutput> {
    let StepParams::Ipg { h } = config.params else {
        return Err(wrong_params(Scheme::Ipg, &config.params));
    };
    config.check_common()?;
    let noise = config.single_noise()?;
    let l = problem.f.lipschitz();
    check_positive("h", h)?;
    if h * l >= 1.0 {
        return Err(Error::InvalidConfig(format!("need 0 < h < 1/L = {}, got h = {h}", 1.0 / l)));
    }
    let constants = LemmaConstants {
        a: (1.0 / h - l) / 4.0,
        b: 1.0 / (h * (1.0 - h * l)),
        c: 1.0 / h + l,
        d: 1.0 / h,
        tau: 0,
    };
    let n = problem.dimension;
    let mut x = config.start_point(n)?;
    let mut rec = Recorder::start(Scheme::Ipg, config.max_iters, config.stop_tol, &x, problem.objective(&x));
    if let Err(m) = rec.check_start() {
        return Err(rec.fail(m, constants, config.noise.clone()));
    }
    while rec.running() {
        let k = rec.steps();
        let e = noise.draw_for_step(k, n)?;
        let eta = noise.eta_for_step(k);
        let v = forward_step(&x, &problem.f.grad(&x), h, &e);
        let next = problem.g.prox(&v, h);
        let witness = prox_witness(&v, &next, h, &problem.f.grad(&next));
        let obj = problem.objective(&next);
        if let Err(m) = rec.push(linalg::dist(&x, &next), eta, None, &next, obj, linalg::norm(&witness)) {
            return Err(rec.fail(m, constants, config.noise.clone()));
        }
        x = next;
    }
    Ok(rec.finish(constants, config.noise.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::Direction;
    use crate::problems::{Quadratic, ZeroProx};
    use std::sync::Arc;

    fn quad(center: f64) -> CompositeProblem {
        CompositeProblem::new(
            Arc::new(Quadratic::new(Vector::from(vec![center]), 1.0)),
            Arc::new(ZeroProx),
        )
        .unwrap()
    }

    #[test]
    fn geometric_contraction() {
        let cfg = SolverConfig::new(StepParams::Ipg { h: 0.5 }, 40, NoiseSchedule::zero());
        let out = run_ipg(&quad(1.0), &cfg).unwrap();
        for r in &out.trace.records {
            assert!((r.x[0] - (1.0 - 0.5f64.powi(r.k as i32))).abs() < 1e-15);
        }
        let w = out.trace.witness_norm(40);
        assert!(w < 1e-11, "{w}");
        assert_eq!(out.constants.a, 0.25);
        assert_eq!(out.constants.b, 4.0);
        assert_eq!(out.constants.c, 3.0);
        assert_eq!(out.constants.d, 2.0);
    }

    #[test]
    fn step_outside_range_rejected() {
        let cfg = SolverConfig::new(StepParams::Ipg { h: 1.0 }, 5, NoiseSchedule::zero());
        assert!(matches!(run_ipg(&quad(1.0), &cfg), Err(Error::InvalidConfig(_))));
        let cfg = SolverConfig::new(StepParams::Ipg { h: -0.1 }, 5, NoiseSchedule::zero());
        assert!(matches!(run_ipg(&quad(1.0), &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn noise_accumulates_on_zero_objective() {
        let p = CompositeProblem::new(Arc::new(Quadratic::zero(1)), Arc::new(ZeroProx)).unwrap();
        let s = NoiseSchedule::power_law(1.0, 1.0, Direction::AdversarialPositive);
        let out = run_ipg(&p, &SolverConfig::new(StepParams::Ipg { h: 1.0 }, 100, s)).unwrap();
        let harmonic: f64 = (1..=100).map(|i| 1.0 / i as f64).sum();
        assert!((out.trace.final_point().unwrap()[0] - harmonic).abs() < 1e-12);
    }

    #[test]
    fn early_stop() {
        let cfg = SolverConfig::new(StepParams::Ipg { h: 0.5 }, 1000, NoiseSchedule::zero()).with_stop_tol(1e-6);
        let out = run_ipg(&quad(1.0), &cfg).unwrap();
        assert!(out.stopped_early);
        assert!(out.trace.steps() < 1000);
    }
}
