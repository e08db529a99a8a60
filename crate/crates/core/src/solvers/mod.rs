//! The five inexact schemes. Each run returns its full trace together with the
//! constants of the descent and relative-error inequalities it is expected to
//! satisfy, so that the diagnostics can check them iterate by iterate.
//!
//! Every record carries a subgradient witness: an element of the limiting
//! subdifferential at the new iterate read off from the optimality condition
//! of the prox step that produced it. Its norm bounds `dist(0, ∂F)` from above.

mod admm;
mod dc;
mod ipg;
mod palm;
mod pire;

pub use admm::run_iadmm;
pub use dc::run_idc;
pub use ipg::run_ipg;
pub use palm::run_ipalm;
pub use pire::run_pire;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::noise::{NoiseModel, NoiseSchedule};
use crate::problems::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ipg,
    Palm,
    Pire,
    Dc,
    Admm,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ipg => "ipg",
            Scheme::Palm => "palm",
            Scheme::Pire => "pire",
            Scheme::Dc => "dc",
            Scheme::Admm => "admm",
        }
    }

    /// Problem family this scheme runs on.
    pub fn family(self) -> &'static str {
        match self {
            Scheme::Ipg => "composite",
            Scheme::Palm => "block",
            Scheme::Pire => "reweighted",
            Scheme::Dc => "dc",
            Scheme::Admm => "admm",
        }
    }
}

/// Step sizes per scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepParams {
    Ipg { h: f64 },
    Palm { gamma: f64, lambda: f64 },
    Pire { mu: f64 },
    Dc { gamma: f64 },
    Admm { alpha: f64, beta: f64 },
}

impl StepParams {
    pub fn scheme(&self) -> Scheme {
        match self {
            StepParams::Ipg { .. } => Scheme::Ipg,
            StepParams::Palm { .. } => Scheme::Palm,
            StepParams::Pire { .. } => Scheme::Pire,
            StepParams::Dc { .. } => Scheme::Dc,
            StepParams::Admm { .. } => Scheme::Admm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub params: StepParams,
    pub max_iters: usize,
    /// Stop once the witness norm drops to this value; 0 disables.
    pub stop_tol: f64,
    /// `Pair` for the splitting scheme, `Single` for the others.
    pub noise: NoiseModel,
    /// Zero when absent. For the splitting scheme this is `x⁰`.
    pub initial_point: Option<Vec<f64>>,
}

impl SolverConfig {
    pub fn new(params: StepParams, max_iters: usize, noise: NoiseSchedule) -> Self {
        let noise = match params {
            StepParams::Admm { .. } => NoiseModel::Pair {
                x: noise.clone(),
                y: noise,
            },
            _ => NoiseModel::Single { schedule: noise },
        };
        Self {
            params,
            max_iters,
            stop_tol: 0.0,
            noise,
            initial_point: None,
        }
    }

    pub fn with_initial_point(mut self, x0: Vec<f64>) -> Self {
        self.initial_point = Some(x0);
        self
    }

    pub fn with_stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = tol;
        self
    }

    fn check_common(&self) -> Result<()> {
        if !(self.stop_tol >= 0.0 && self.stop_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("stop_tol must be ≥ 0, got {}", self.stop_tol)));
        }
        match &self.noise {
            NoiseModel::Single { schedule } => schedule.validate(),
            NoiseModel::Pair { x, y } => x.validate().and(y.validate()),
        }
        .map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    fn single_noise(&self) -> Result<&NoiseSchedule> {
        match &self.noise {
            NoiseModel::Single { schedule } => Ok(schedule),
            NoiseModel::Pair { .. } => Err(Error::InvalidConfig(format!(
                "{} takes a single noise schedule",
                self.params.scheme().name()
            ))),
        }
    }

    fn start_point(&self, dim: usize) -> Result<Vector> {
        match &self.initial_point {
            None => Ok(Vector::zeros(dim)),
            Some(v) if v.len() == dim && v.iter().all(|x| x.is_finite()) => Ok(Vector::from(v.clone())),
            Some(v) => Err(Error::InvalidConfig(format!(
                "initial point has {} finite-checked entries, problem dimension is {dim}",
                v.len()
            ))),
        }
    }
}

/// Scheme-specific per-step quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Extras {
    #[default]
    None,
    /// Range of the weights `wᵏ` at this iterate.
    Pire { min_weight: f64, max_weight: f64 },
    /// Quantities of the step from this iterate to the next.
    Admm {
        dual_step: f64,
        y_step: f64,
        /// `‖e₂ᵏ⁺¹ − e₂ᵏ‖`.
        noise_y_diff: f64,
        /// Step of the extended point `(x, y, γ, y_prev)`.
        d_step: f64,
    },
}

/// One iterate. Step quantities (`step_norm`, `eta`) describe the move from
/// this iterate to the next and are absent on the last record; the witness
/// certifies this iterate and is absent on the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub k: usize,
    /// `x`, or `(y, z)` stacked, or `(x, y, γ)` stacked.
    pub x: Vec<f64>,
    pub obj: f64,
    pub step_norm: Option<f64>,
    pub eta: Option<f64>,
    pub witness_norm: Option<f64>,
    #[serde(default)]
    pub extras: Extras,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub scheme: Scheme,
    pub records: Vec<IterateRecord>,
}

impl Trace {
    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn obj(&self, k: usize) -> f64 {
        self.records[k].obj
    }

    pub fn step_norm(&self, k: usize) -> f64 {
        self.records[k].step_norm.unwrap_or(0.0)
    }

    pub fn eta(&self, k: usize) -> f64 {
        self.records[k].eta.unwrap_or(0.0)
    }

    pub fn witness_norm(&self, k: usize) -> f64 {
        self.records[k].witness_norm.unwrap_or(0.0)
    }

    pub fn final_point(&self) -> Option<&[f64]> {
        self.records.last().map(|r| r.x.as_slice())
    }
}

/// Constants of the pseudo sufficient descent
/// `obj(k) − obj(k+1) ≥ a·‖Δ‖² − b·η_k²` and the pseudo relative error
/// `witness(k+1) ≤ c·Σ_{j=k−τ}^{k} ‖Δʲ‖ + d·η_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub tau: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trace: Trace,
    pub constants: LemmaConstants,
    pub noise: NoiseModel,
    pub stopped_early: bool,
}

/// Dispatches on the problem family; a mismatched pairing is a config error.
pub fn run(problem: &Problem, config: &SolverConfig) -> Result<RunOutput> {
    match (problem, config.params.scheme()) {
        (Problem::Composite(p), Scheme::Ipg) => run_ipg(p, config),
        (Problem::Block(p), Scheme::Palm) => run_ipalm(p, config),
        (Problem::Reweighted(p), Scheme::Pire) => run_pire(p, config),
        (Problem::Dc(p), Scheme::Dc) => run_idc(p, config),
        (Problem::Admm(p), Scheme::Admm) => run_iadmm(p, config),
        (p, s) => Err(Error::InvalidConfig(format!(
            "scheme {} runs on {} problems, got a {} problem",
            s.name(),
            s.family(),
            p.family()
        ))),
    }
}

/// `(x − step·g) + e`, coordinatewise in this order so that schemes reducing
/// to one another produce identical floating point values.
pub(crate) fn forward_step(x: &Vector, g: &Vector, step: f64, e: &Vector) -> Vector {
    ndarray::Zip::from(x)
        .and(g)
        .and(e)
        .map_collect(|&x, &g, &e| (x - step * g) + e)
}

/// `(v − p)/step + g`: the prox residual plus the smooth gradient.
pub(crate) fn prox_witness(v: &Vector, p: &Vector, step: f64, g: &Vector) -> Vector {
    ndarray::Zip::from(v)
        .and(p)
        .and(g)
        .map_collect(|&v, &p, &g| (v - p) / step + g)
}

/// Append-only trace builder shared by the schemes.
pub(crate) struct Recorder {
    scheme: Scheme,
    records: Vec<IterateRecord>,
    max_iters: usize,
    stop_tol: f64,
    stopped_early: bool,
}

impl Recorder {
    pub fn start(scheme: Scheme, max_iters: usize, stop_tol: f64, x0: &Vector, obj0: f64) -> Self {
        let mut records = Vec::with_capacity(max_iters.min(1 << 20) + 1);
        records.push(IterateRecord {
            k: 0,
            x: x0.to_vec(),
            obj: obj0,
            step_norm: None,
            eta: None,
            witness_norm: None,
            extras: Extras::None,
        });
        Self {
            scheme,
            records,
            max_iters,
            stop_tol,
            stopped_early: false,
        }
    }

    pub fn check_start(&self) -> std::result::Result<(), String> {
        let r = &self.records[0];
        if !r.obj.is_finite() {
            return Err(format!("objective at the initial point is {}", r.obj));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    /// Whether another step should be taken.
    pub fn running(&self) -> bool {
        !self.stopped_early && self.steps() < self.max_iters
    }

    /// Set the extras of the current (last) iterate.
    pub fn set_extras(&mut self, extras: Extras) {
        self.records.last_mut().expect("nonempty").extras = extras;
    }

    /// Records one step; returns a message on a non-finite value, leaving the
    /// trace at the last finite iterate.
    pub fn push(
        &mut self,
        step_norm: f64,
        eta: f64,
        step_extras: Option<Extras>,
        next: &Vector,
        obj: f64,
        witness_norm: f64,
    ) -> std::result::Result<(), String> {
        let k = self.records.len();
        if !linalg::is_finite(next) {
            return Err(format!("iterate {k} has non-finite entries"));
        }
        for (name, v) in [("objective", obj), ("step norm", step_norm), ("witness norm", witness_norm)] {
            if !v.is_finite() {
                return Err(format!("{name} at iterate {k} is {v}"));
            }
        }
        let last = self.records.last_mut().expect("nonempty");
        last.step_norm = Some(step_norm);
        last.eta = Some(eta);
        if let Some(e) = step_extras {
            last.extras = e;
        }
        self.records.push(IterateRecord {
            k,
            x: next.to_vec(),
            obj,
            step_norm: None,
            eta: None,
            witness_norm: Some(witness_norm),
            extras: Extras::None,
        });
        if self.stop_tol > 0.0 && witness_norm <= self.stop_tol {
            self.stopped_early = true;
        }
        Ok(())
    }

    pub fn finish(self, constants: LemmaConstants, noise: NoiseModel) -> RunOutput {
        RunOutput {
            trace: Trace {
                scheme: self.scheme,
                records: self.records,
            },
            constants,
            noise,
            stopped_early: self.stopped_early,
        }
    }

    pub fn fail(self, message: String, constants: LemmaConstants, noise: NoiseModel) -> Error {
        Error::NumericFailure {
            message,
            partial: Some(Box::new(self.finish(constants, noise))),
        }
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
    }
}

pub(crate) fn wrong_params(scheme: Scheme, params: &StepParams) -> Error {
    Error::InvalidConfig(format!(
        "{} solver given {} step parameters",
        scheme.name(),
        params.scheme().name()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_admm_quadratic, ProblemSpec};

    #[test]
    fn mismatched_pairing_is_config_error() {
        let p = Problem::Admm(make_admm_quadratic(1.0, 1).unwrap());
        let cfg = SolverConfig::new(StepParams::Pire { mu: 0.5 }, 10, NoiseSchedule::zero());
        assert!(matches!(run(&p, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn wrong_initial_dimension() {
        let p = ProblemSpec::Zero { dimension: 2 }.build().unwrap();
        let cfg = SolverConfig::new(StepParams::Ipg { h: 0.5 }, 3, NoiseSchedule::zero())
            .with_initial_point(vec![1.0]);
        assert!(matches!(run(&p, &cfg), Err(Error::InvalidConfig(_))));
    }
}
