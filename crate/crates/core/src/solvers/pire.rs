use super::*;
use crate::oracles::prox_weighted_l1;
use crate::problems::ReweightedProblem;

/// Proximal iteratively reweighted step:
/// `x⁺ᵢ = prox_{μwᵢ|·|}(xᵢ − μ∇ᵢf(x) + eᵢ)` with `wᵢ = h'(|xᵢ|)`.
///
/// The relative-error constants depend on the realised weight range
/// `[δ, π]` and on `L̃ = max_k ‖∇f(xᵏ)‖_∞`, so they are fixed at the end of
/// the run from the trace.
pub fn run_pire(problem: &ReweightedProblem, config: &SolverConfig) -> Result<RunOutput> {
    let StepParams::Pire { mu } = config.params else {
        return Err(wrong_params(Scheme::Pire, &config.params));
    };
    config.check_common()?;
    let noise = config.single_noise()?;
    let l_f = problem.f.lipschitz();
    check_positive("mu", mu)?;
    if mu * l_f >= 2.0 {
        return Err(Error::InvalidConfig(format!("need 0 < mu < 2/L_f = {}, got {mu}", 2.0 / l_f)));
    }
    let n = problem.dimension;
    let l_h = problem.penalty.derivative_lipschitz();
    let d_g = problem.inner_lipschitz();
    let mut stats = WeightStats::default();
    let constants = |s: &WeightStats| {
        let root_n = (n as f64).sqrt();
        let (delta, pi) = if s.delta.is_finite() { (s.delta, s.pi) } else { (1.0, 1.0) };
        let d = pi * root_n / (mu * delta);
        LemmaConstants {
            a: (1.0 / mu - l_f / 2.0) / 2.0,
            b: 1.0 / (mu * (2.0 - mu * l_f)),
            c: l_f + s.grad_inf * l_h * d_g * root_n / delta + d,
            d,
            tau: 0,
        }
    };

    let mut x = config.start_point(n)?;
    let mut w = weights(problem, &x, 0)?;
    stats.add_weights(&w);
    let mut rec = Recorder::start(Scheme::Pire, config.max_iters, config.stop_tol, &x, problem.objective(&x));
    rec.set_extras(stats.extras(&w));
    if let Err(m) = rec.check_start() {
        return Err(rec.fail(m, constants(&stats), config.noise.clone()));
    }
    while rec.running() {
        let k = rec.steps();
        let e = noise.draw_for_step(k, n)?;
        let eta = noise.eta_for_step(k);
        let g0 = problem.f.grad(&x);
        stats.grad_inf = g0.iter().fold(stats.grad_inf, |m, v| m.max(v.abs()));
        let v = forward_step(&x, &g0, mu, &e);
        let next = prox_weighted_l1(&v, &w, mu)?;
        if !linalg::is_finite(&next) {
            let m = format!("iterate {} has non-finite entries", k + 1);
            return Err(rec.fail(m, constants(&stats), config.noise.clone()));
        }
        let w1 = weights(problem, &next, k + 1)?;
        // (v − x⁺)/μ = wᵢ·sᵢ with sᵢ ∈ ∂|x⁺ᵢ|, so wᵢ⁺·sᵢ = rᵢ·(v − x⁺)/μ.
        let g1 = problem.f.grad(&next);
        let witness: Vector = ndarray::Zip::from(&v)
            .and(&next)
            .and(&g1)
            .and(&w)
            .and(&w1)
            .map_collect(|&v, &p, &g, &w0, &w1| g + (w1 / w0) * ((v - p) / mu));
        let obj = problem.objective(&next);
        if let Err(m) = rec.push(linalg::dist(&x, &next), eta, None, &next, obj, linalg::norm(&witness)) {
            return Err(rec.fail(m, constants(&stats), config.noise.clone()));
        }
        stats.add_weights(&w1);
        rec.set_extras(stats.extras(&w1));
        x = next;
        w = w1;
    }
    let c = constants(&stats);
    Ok(rec.finish(c, config.noise.clone()))
}

#[derive(Debug)]
struct WeightStats {
    delta: f64,
    pi: f64,
    grad_inf: f64,
}

impl Default for WeightStats {
    fn default() -> Self {
        Self {
            delta: f64::INFINITY,
            pi: 0.0,
            grad_inf: 0.0,
        }
    }
}

impl WeightStats {
    fn add_weights(&mut self, w: &Vector) {
        for &v in w {
            self.delta = self.delta.min(v);
            self.pi = self.pi.max(v);
        }
    }

    fn extras(&self, w: &Vector) -> Extras {
        Extras::Pire {
            min_weight: w.iter().copied().fold(f64::INFINITY, f64::min),
            max_weight: w.iter().copied().fold(0.0, f64::max),
        }
    }
}

fn weights(problem: &ReweightedProblem, x: &Vector, k: usize) -> Result<Vector> {
    let w = problem.weights(x);
    if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::ModelViolation(format!(
            "weight {i} at iterate {k} is {v}; the penalty derivative must stay positive"
        )));
    }
    Ok(w)
}
