//! Noise schedules `η_k`, noise vectors `eᵏ`, square tail sums, the auxiliary
//! sequence `t_k` and the Lyapunov value `ξ`.
//!
//! Solvers index their steps from 0; step `j` uses schedule index
//! `j + start_index`, so with the default `start_index = 1` the first step
//! sees `η_1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};

/// Magnitude rule for `η_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Zero,
    /// `η_k = c / k^alpha`.
    PowerLaw { c: f64, alpha: f64 },
    Constant { c: f64 },
    /// `η_k = values[k − start_index]`, zero past the end.
    Explicit { values: Vec<f64> },
}

/// Direction policy for `eᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "snake_case")]
pub enum Direction {
    /// Uniform on the sphere, deterministic per `(seed, k)`.
    RandomSphere { seed: u64 },
    Fixed { vector: Vec<f64> },
    /// `η_k/√n` in every coordinate; in 1-D this is `eᵏ = η_k`.
    AdversarialPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(flatten)]
    pub direction: Direction,
    #[serde(default = "default_start")]
    pub start_index: u64,
}

fn default_start() -> u64 {
    1
}

/// Horizon below which power-law tails are summed term by term.
const TAIL_HORIZON: u64 = 1_000_000;

/// Default absolute tolerance for tail sums.
pub const TAIL_TOL: f64 = 1e-14;

impl NoiseSchedule {
    pub fn new(kind: NoiseKind, direction: Direction) -> Self {
        Self {
            kind,
            direction,
            start_index: 1,
        }
    }

    pub fn zero() -> Self {
        Self::new(NoiseKind::Zero, Direction::AdversarialPositive)
    }

    pub fn power_law(c: f64, alpha: f64, direction: Direction) -> Self {
        Self::new(NoiseKind::PowerLaw { c, alpha }, direction)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            NoiseKind::Zero => {}
            NoiseKind::PowerLaw { c, alpha } => {
                if !(*c >= 0.0 && c.is_finite() && *alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "power law needs c ≥ 0 and alpha > 0, got c={c}, alpha={alpha}"
                    )));
                }
            }
            NoiseKind::Constant { c } => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(Error::InvalidArgument(format!("constant noise must be ≥ 0, got {c}")));
                }
            }
            NoiseKind::Explicit { values } => {
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::InvalidArgument("explicit noise values must be finite and ≥ 0".into()));
                }
            }
        }
        if let Direction::Fixed { vector } = &self.direction {
            let n = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidArgument("fixed noise direction must be a nonzero vector".into()));
            }
        }
        Ok(())
    }

    /// `η_k`.
    pub fn eta(&self, k: u64) -> Result<f64> {
        if k < self.start_index {
            return Err(Error::InvalidArgument(format!(
                "noise index {k} precedes start index {}",
                self.start_index
            )));
        }
        Ok(match &self.kind {
            NoiseKind::Zero => 0.0,
            NoiseKind::PowerLaw { c, alpha } => c / (k as f64).powf(*alpha),
            NoiseKind::Constant { c } => *c,
            NoiseKind::Explicit { values } => values
                .get((k - self.start_index) as usize)
                .copied()
                .unwrap_or(0.0),
        })
    }

    /// `η` used by solver step `step` (0-based).
    pub fn eta_for_step(&self, step: usize) -> f64 {
        self.eta(step as u64 + self.start_index)
            .expect("step index is never below start_index")
    }

    /// Whether `Σ η_k < ∞`.
    pub fn is_summable(&self) -> bool {
        match &self.kind {
            NoiseKind::Zero | NoiseKind::Explicit { .. } => true,
            NoiseKind::PowerLaw { c, alpha } => *c == 0.0 || *alpha > 1.0,
            NoiseKind::Constant { c } => *c == 0.0,
        }
    }

    fn square_summable(&self) -> Result<()> {
        match &self.kind {
            NoiseKind::PowerLaw { c, alpha } if *c > 0.0 && *alpha <= 0.5 => Err(Error::NotSummable(
                format!("power law with alpha = {alpha} ≤ 1/2"),
            )),
            NoiseKind::Constant { c } if *c > 0.0 => {
                Err(Error::NotSummable(format!("constant noise {c} > 0")))
            }
            _ => Ok(()),
        }
    }

    /// `Σ_{l ≥ k} η_l²`.
    ///
    /// Power laws are summed exactly up to `max(k, 10⁶)` and the remainder is
    /// taken from the Euler–Maclaurin expansion of `∫ c² t^{−2α} dt`; the
    /// horizon is pushed out until the first omitted correction is below
    /// `tolerance`. Explicit and zero schedules are exact finite sums.
    pub fn tail_sum_sq(&self, k: u64, tolerance: f64) -> Result<f64> {
        if k < self.start_index {
            return Err(Error::InvalidArgument(format!(
                "noise index {k} precedes start index {}",
                self.start_index
            )));
        }
        self.square_summable()?;
        match &self.kind {
            NoiseKind::Zero | NoiseKind::Constant { .. } => Ok(0.0),
            NoiseKind::Explicit { values } => {
                let from = (k - self.start_index) as usize;
                Ok(values.iter().skip(from).rev().map(|v| v * v).sum())
            }
            NoiseKind::PowerLaw { c, alpha } => Ok(power_tail(c * c, 2.0 * alpha, k, tolerance)),
        }
    }

    /// `Σ_{l ≥ k} η_l²` for `k = from, …, from + count` (length `count + 1`),
    /// built backwards from a single tail evaluation.
    pub fn tail_sums_sq(&self, from: u64, count: usize, tolerance: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; count + 1];
        out[count] = self.tail_sum_sq(from + count as u64, tolerance)?;
        for i in (0..count).rev() {
            let e = self.eta(from + i as u64)?;
            out[i] = out[i + 1] + e * e;
        }
        Ok(out)
    }

    /// Noise vector `eᵏ` with `‖eᵏ‖ = η_k`.
    pub fn draw_noise(&self, k: u64, dimension: usize) -> Result<Vector> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let eta = self.eta(k)?;
        if eta == 0.0 {
            return Ok(Vector::zeros(dimension));
        }
        let unit = match &self.direction {
            Direction::AdversarialPositive => {
                return Ok(Vector::from_elem(dimension, eta / (dimension as f64).sqrt()))
            }
            Direction::Fixed { vector } => {
                if vector.len() != dimension {
                    return Err(Error::InvalidArgument(format!(
                        "fixed direction has {} entries, problem has {dimension}",
                        vector.len()
                    )));
                }
                let v = Vector::from(vector.clone());
                let n = linalg::norm(&v);
                v / n
            }
            Direction::RandomSphere { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(k);
                loop {
                    let v: Vector =
                        Vector::from_shape_simple_fn(dimension, || rng.sample::<f64, _>(StandardNormal));
                    let n = linalg::norm(&v);
                    if n > 0.0 {
                        break v / n;
                    }
                }
            }
        };
        Ok(unit * eta)
    }

    pub fn draw_for_step(&self, step: usize, dimension: usize) -> Result<Vector> {
        self.draw_noise(step as u64 + self.start_index, dimension)
    }
}

fn power_tail(c2: f64, p: f64, k: u64, tolerance: f64) -> f64 {
    let term = |l: f64| c2 * l.powf(-p);
    let mut horizon = k.max(TAIL_HORIZON);
    // Euler–Maclaurin remainder Σ_{l ≥ H} f(l) through the f''' term; the next
    // correction is f⁽⁵⁾(H)/30240.
    let remainder = |h: f64| {
        let integral = c2 * h.powf(1.0 - p) / (p - 1.0);
        let d1 = -p * c2 * h.powf(-p - 1.0);
        let d3 = -p * (p + 1.0) * (p + 2.0) * c2 * h.powf(-p - 3.0);
        let next = p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * c2 * h.powf(-p - 5.0) / 30240.0;
        (integral + 0.5 * term(h) - d1 / 12.0 + d3 / 720.0, next)
    };
    loop {
        let (_, next) = remainder(horizon as f64);
        if next <= tolerance || horizon >= 1 << 40 {
            break;
        }
        horizon *= 2;
    }
    let (tail, _) = remainder(horizon as f64);
    // small terms first
    let mut sum = tail;
    let mut l = horizon;
    while l > k {
        l -= 1;
        sum += term(l as f64);
    }
    sum
}

/// `θ` and the descent constant `b` entering `t_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovParams {
    pub theta: f64,
    pub b: f64,
}

impl LyapunovParams {
    pub fn new(theta: f64, b: f64) -> Result<Self> {
        if !(theta > 1.0 && theta.is_finite()) {
            return Err(Error::InvalidArgument(format!("theta must exceed 1, got {theta}")));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be nonnegative, got {b}")));
        }
        Ok(Self { theta, b })
    }

    /// `t = (θ·b·tail)^{1/θ}` for a given square tail sum.
    pub fn t_from_tail(&self, tail: f64) -> f64 {
        (self.theta * self.b * tail).powf(1.0 / self.theta)
    }
}

/// `t_k = (θ·b·Σ_{l ≥ k} η_l²)^{1/θ}`.
pub fn t_sequence(schedule: &NoiseSchedule, params: &LyapunovParams, k: u64) -> Result<f64> {
    Ok(params.t_from_tail(schedule.tail_sum_sq(k, TAIL_TOL)?))
}

/// `ξ = F + t^θ/θ`.
pub fn xi(f_value: f64, t: f64, theta: f64) -> f64 {
    f_value + t.powf(theta) / theta
}

/// `c(θ) = (2θ − 1) / (2(θ − 1))`, the smallest noise decay exponent
/// admitted by a given `θ`.
pub fn c_theta(theta: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return Err(Error::InvalidArgument(format!("theta must exceed 1, got {theta}")));
    }
    Ok((2.0 * theta - 1.0) / (2.0 * (theta - 1.0)))
}

/// Noise driving one solver run. The splitting scheme draws two independent
/// streams; its recorded `η` is the norm of the aggregated vector `εᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseModel {
    Single { schedule: NoiseSchedule },
    Pair { x: NoiseSchedule, y: NoiseSchedule },
}

impl NoiseModel {
    pub fn is_summable(&self) -> bool {
        match self {
            NoiseModel::Single { schedule } => schedule.is_summable(),
            NoiseModel::Pair { x, y } => x.is_summable() && y.is_summable(),
        }
    }

    /// Sum of recorded `η_j²` over steps `j ≥ steps`, i.e. beyond a trace of
    /// `steps` steps. Exact for a single schedule; for the pair it is the bound
    /// `3·T_y(K) + 2·T_y(K−1) + T_x(K)` from
    /// `‖εʲ‖² ≤ 3‖e₂ʲ⁺¹‖² + 2‖e₂ʲ‖² + ‖e₁ʲ⁺¹‖²`.
    pub fn tail_beyond(&self, steps: usize) -> Result<f64> {
        match self {
            NoiseModel::Single { schedule } => {
                schedule.tail_sum_sq(steps as u64 + schedule.start_index, TAIL_TOL)
            }
            NoiseModel::Pair { x, y } => {
                let k = steps as u64;
                let prev = k.saturating_sub(1);
                Ok(3.0 * y.tail_sum_sq(k + y.start_index, TAIL_TOL)?
                    + 2.0 * y.tail_sum_sq(prev + y.start_index, TAIL_TOL)?
                    + x.tail_sum_sq(k + x.start_index, TAIL_TOL)?)
            }
        }
    }
}
