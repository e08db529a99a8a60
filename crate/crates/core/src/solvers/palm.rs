use ndarray::s;

use super::*;
use crate::problems::BlockProblem;

/// Inexact PALM. The noise vector is drawn on the stacked `(y, z)` space and
/// split into `(αᵏ, βᵏ)`:
///
/// `y⁺ = prox_{γf}(y − γ∇_y H(y, z) + αᵏ)`,
/// `z⁺ = prox_{λg}(z − λ∇_z H(y⁺, z) + βᵏ)`.
pub fn run_ipalm(problem: &BlockProblem, config: &SolverConfig) -> Result<RunOutput> {
    let StepParams::Palm { gamma, lambda } = config.params else {
        return Err(wrong_params(Scheme::Palm, &config.params));
    };
    config.check_common()?;
    let noise = config.single_noise()?;
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    let (m, n, l) = (problem.m, problem.n, problem.l);
    if gamma * m >= 1.0 || lambda * n >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "need gamma < 1/M = {} and lambda < 1/N = {}, got {gamma}, {lambda}",
            1.0 / m,
            1.0 / n
        )));
    }
    // The z-residual moves with N, not L, so the larger of the two enters S.
    let constants = LemmaConstants {
        a: ((1.0 / gamma - m) / 4.0).min((1.0 / lambda - n) / 4.0),
        b: (1.0 / (gamma * (1.0 - gamma * m))).max(1.0 / (lambda * (1.0 - lambda * n))),
        c: 1.0 / gamma + 1.0 / lambda + 2.0 * l.max(n),
        d: (1.0 / (gamma * gamma) + 1.0 / (lambda * lambda)).sqrt(),
        tau: 0,
    };
    let (dy, dz) = (problem.dim_y, problem.dim_z);
    let x0 = config.start_point(dy + dz)?;
    let (mut y, mut z) = problem.split(&x0);
    let grad = |y: &Vector, z: &Vector| {
        let g = problem.coupling.grad(&linalg::concat(y, z));
        (g.slice(s![..dy]).to_owned(), g.slice(s![dy..]).to_owned())
    };
    let mut rec = Recorder::start(
        Scheme::Palm,
        config.max_iters,
        config.stop_tol,
        &x0,
        problem.objective(&y, &z),
    );
    if let Err(msg) = rec.check_start() {
        return Err(rec.fail(msg, constants, config.noise.clone()));
    }
    while rec.running() {
        let k = rec.steps();
        let e = noise.draw_for_step(k, dy + dz)?;
        let (ey, ez) = problem.split(&e);
        let eta = noise.eta_for_step(k);

        let (gy, _) = grad(&y, &z);
        let vy = forward_step(&y, &gy, gamma, &ey);
        let y1 = problem.f.prox(&vy, gamma);
        let (_, gz) = grad(&y1, &z);
        let vz = forward_step(&z, &gz, lambda, &ez);
        let z1 = problem.g.prox(&vz, lambda);

        let (gy1, gz1) = grad(&y1, &z1);
        let wy = prox_witness(&vy, &y1, gamma, &gy1);
        let wz = prox_witness(&vz, &z1, lambda, &gz1);
        let witness = (wy.dot(&wy) + wz.dot(&wz)).sqrt();
        let step = (linalg::dist(&y, &y1).powi(2) + linalg::dist(&z, &z1).powi(2)).sqrt();
        let next = linalg::concat(&y1, &z1);
        let obj = problem.objective(&y1, &z1);
        if let Err(msg) = rec.push(step, eta, None, &next, obj, witness) {
            return Err(rec.fail(msg, constants, config.noise.clone()));
        }
        y = y1;
        z = z1;
    }
    Ok(rec.finish(constants, config.noise.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{CoupledQuadratic, ZeroProx};
    use std::sync::Arc;

    #[test]
    fn linear_coupling_meets_in_the_middle() {
        // H = ½(y − z)², M = N = L = 1
        let h = Arc::new(CoupledQuadratic::new(Vector::zeros(1), 0.0));
        let p = BlockProblem::new(Arc::new(ZeroProx), Arc::new(ZeroProx), h, 1.0, 1.0, 1.0, 1, 1).unwrap();
        let cfg = SolverConfig::new(StepParams::Palm { gamma: 0.4, lambda: 0.4 }, 200, NoiseSchedule::zero())
            .with_initial_point(vec![1.0, 0.0]);
        let out = run_ipalm(&p, &cfg).unwrap();
        let last = out.trace.final_point().unwrap();
        assert!((last[0] - last[1]).abs() < 1e-10);
        assert!(out.trace.witness_norm(200) <= 1e-8);
        // oracle: the 2-D linear map of one sweep
        let (mut y, mut z) = (1.0f64, 0.0f64);
        for r in &out.trace.records {
            assert!((r.x[0] - y).abs() < 1e-14 && (r.x[1] - z).abs() < 1e-14);
            y -= 0.4 * (y - z);
            z -= 0.4 * (z - y);
        }
    }

    #[test]
    fn steps_must_respect_block_constants() {
        let h = Arc::new(CoupledQuadratic::new(Vector::zeros(1), 1.0));
        let p = BlockProblem::new(Arc::new(ZeroProx), Arc::new(ZeroProx), h, 1.0, 2.0, 2f64.sqrt(), 1, 1).unwrap();
        let cfg = SolverConfig::new(StepParams::Palm { gamma: 0.5, lambda: 0.5 }, 3, NoiseSchedule::zero());
        assert!(matches!(run_ipalm(&p, &cfg), Err(Error::InvalidConfig(_))));
    }
}
