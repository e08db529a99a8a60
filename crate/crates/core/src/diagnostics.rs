//! Certification of solver traces: pseudo sufficient descent, pseudo relative
//! error, monotonicity of the Lyapunov sequence `ξ`, finite length and a
//! convergence verdict.
//!
//! Every check is a pure function of the recorded scalars (objective, step
//! norm, `η`, witness norm and scheme extras), so a trace reloaded from disk
//! yields the same report as the live run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{xi, LyapunovParams, NoiseModel};
use crate::solvers::{Extras, LemmaConstants, Scheme, Trace};

/// A failed inequality at step `k`. `margin < 0` means violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub k: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Diverged,
    Undetermined,
}

/// Tolerances and verdict thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSettings {
    pub theta: f64,
    /// Relative tolerance of the inequality checks.
    pub tol: f64,
    pub window: usize,
    pub cauchy_tol: f64,
    pub escape_radius: f64,
    /// Final witness norm below which a Cauchy trace counts as converged.
    pub witness_tol: f64,
}

impl Default for DiagnosticsSettings {
    fn default() -> Self {
        Self {
            theta: 2.0,
            tol: 1e-9,
            window: 100,
            cauchy_tol: 1e-6,
            escape_radius: 1e6,
            witness_tol: 1e-6,
        }
    }
}

fn require_steps(trace: &Trace) -> Result<()> {
    if trace.records.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "trace needs at least two iterates, has {}",
            trace.records.len()
        )));
    }
    Ok(())
}

/// `obj(k) − obj(k+1) ≥ a·step(k)² − b·η_k²`, violated when the margin is
/// below `−tol·(1 + |obj(k)|)`.
pub fn check_sufficient_descent(trace: &Trace, constants: &LemmaConstants, tol: f64) -> Result<Vec<Violation>> {
    require_steps(trace)?;
    Ok((0..trace.steps())
        .filter_map(|k| {
            let s = trace.step_norm(k);
            let e = trace.eta(k);
            let margin = (trace.obj(k) - trace.obj(k + 1)) - constants.a * s * s + constants.b * e * e;
            (margin < -tol * (1.0 + trace.obj(k).abs())).then_some(Violation { k, margin })
        })
        .collect())
}

/// `Σ_{j=k−τ}^{k} step(j)`, truncated at `j = 0`.
fn window_sum(trace: &Trace, k: usize, tau: usize) -> f64 {
    (k.saturating_sub(tau)..=k).map(|j| trace.step_norm(j)).sum()
}

/// `witness(k+1) ≤ c·Σ_{j=k−τ}^{k} step(j) + d·η_k`, violated when the margin
/// is below `−tol`.
pub fn check_relative_error(trace: &Trace, constants: &LemmaConstants, tol: f64) -> Result<Vec<Violation>> {
    require_steps(trace)?;
    if trace.records[1..].iter().any(|r| r.witness_norm.is_none()) {
        return Err(Error::InvalidArgument("trace is missing witness norms".into()));
    }
    Ok((0..trace.steps())
        .filter_map(|k| {
            let margin = constants.c * window_sum(trace, k, constants.tau) + constants.d * trace.eta(k)
                - trace.witness_norm(k + 1);
            (margin < -tol).then_some(Violation { k, margin })
        })
        .collect())
}

/// Outcome of the Lyapunov audit.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCheck {
    /// `ξ` never increases (up to tolerance).
    pub monotone: bool,
    /// Smallest `ξ_k − ξ_{k+1} − a·step(k)²`.
    pub worst_margin: f64,
    /// Largest `|(ξ_k − ξ_{k+1}) − (ΔF + b·η_k²)| / (1 + |ξ_k|)`.
    pub identity_max_error: f64,
    /// Steps where the raw objective rises.
    pub obj_increases: usize,
    /// Of those, how many rises are covered by `b·η_k²`.
    pub reconciled_increases: usize,
    /// Violations of `witness(k+1) + t_{k+1}^{θ−1} ≤ c·Σ step + d·η_k + t_{k+1}^{θ−1}`.
    pub subgradient_bound_violations: usize,
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
}

/// `Σ_{l ≥ k} η_l²` for every iterate `k` of the trace: the recorded values
/// plus the schedule tail beyond the horizon.
pub fn noise_tails(trace: &Trace, noise: &NoiseModel) -> Result<Vec<f64>> {
    let steps = trace.steps();
    let mut tails = vec![0.0; steps + 1];
    tails[steps] = noise.tail_beyond(steps)?;
    for k in (0..steps).rev() {
        let e = trace.eta(k);
        tails[k] = tails[k + 1] + e * e;
    }
    Ok(tails)
}

/// Builds `t_k` and `ξ_k = obj(k) + t_k^θ/θ` and checks
/// `ξ_k − ξ_{k+1} ≥ a·step(k)²` together with the exact identity
/// `ξ_k − ξ_{k+1} = obj(k) − obj(k+1) + b·η_k²`.
pub fn check_lyapunov(
    trace: &Trace,
    noise: &NoiseModel,
    params: &LyapunovParams,
    constants: &LemmaConstants,
    tol: f64,
) -> Result<LyapunovCheck> {
    require_steps(trace)?;
    if params.b != constants.b {
        return Err(Error::InvalidArgument(format!(
            "Lyapunov b = {} differs from the descent constant b = {}",
            params.b, constants.b
        )));
    }
    let tails = noise_tails(trace, noise)?;
    let t: Vec<f64> = tails.iter().map(|&s| params.t_from_tail(s)).collect();
    let xi_values: Vec<f64> = t
        .iter()
        .enumerate()
        .map(|(k, &tk)| xi(trace.obj(k), tk, params.theta))
        .collect();

    let mut check = LyapunovCheck {
        monotone: true,
        worst_margin: f64::INFINITY,
        identity_max_error: 0.0,
        obj_increases: 0,
        reconciled_increases: 0,
        subgradient_bound_violations: 0,
        t: Vec::new(),
        xi: Vec::new(),
    };
    let b = constants.b;
    for k in 0..trace.steps() {
        let s = trace.step_norm(k);
        let e = trace.eta(k);
        let scale = 1.0 + xi_values[k].abs();
        let drop = xi_values[k] - xi_values[k + 1];
        let d_obj = trace.obj(k) - trace.obj(k + 1);
        if drop < -tol * scale {
            check.monotone = false;
        }
        check.worst_margin = check.worst_margin.min(drop - constants.a * s * s);
        check.identity_max_error = check
            .identity_max_error
            .max((drop - (d_obj + b * e * e)).abs() / scale);
        if d_obj < 0.0 {
            check.obj_increases += 1;
            if -d_obj <= b * e * e + tol * (1.0 + trace.obj(k).abs()) {
                check.reconciled_increases += 1;
            }
        }
        let extra = t[k + 1].powf(params.theta - 1.0);
        let lhs = trace.witness_norm(k + 1) + extra;
        let rhs = constants.c * window_sum(trace, k, constants.tau) + constants.d * e + extra;
        if lhs > rhs + tol {
            check.subgradient_bound_violations += 1;
        }
    }
    check.t = t;
    check.xi = xi_values;
    Ok(check)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLength {
    pub verdict: Verdict,
    /// `Σ_{j ≤ k} step(j)` for each step `k`.
    pub path_length_partial: Vec<f64>,
    /// Sum of the last `window` step norms.
    pub tail: f64,
}

/// Verdict from the path length:
///
/// * `converged` when the last `window` steps sum below `cauchy_tol` and the
///   final witness is below `witness_tol`;
/// * `diverged` when the path leaves the escape radius, or when the noise is
///   not summable and the path keeps pace with it: tail at least
///   `cauchy_tol` and total length at least `0.9·Σ η_k`;
/// * `undetermined` otherwise, including traces shorter than the window.
pub fn check_finite_length(
    trace: &Trace,
    noise_summable: bool,
    settings: &DiagnosticsSettings,
) -> Result<FiniteLength> {
    require_steps(trace)?;
    let steps = trace.steps();
    let mut acc = 0.0;
    let path_length_partial: Vec<f64> = (0..steps)
        .map(|k| {
            acc += trace.step_norm(k);
            acc
        })
        .collect();
    let total = acc;
    let window = settings.window.max(1);
    let tail: f64 = (steps.saturating_sub(window)..steps).map(|k| trace.step_norm(k)).sum();
    let eta_sum: f64 = (0..steps).map(|k| trace.eta(k)).sum();
    let final_witness = trace.witness_norm(steps);

    let verdict = if total > settings.escape_radius
        || (!noise_summable && tail >= settings.cauchy_tol && total >= 0.9 * eta_sum)
    {
        Verdict::Diverged
    } else if steps >= window && tail < settings.cauchy_tol && final_witness < settings.witness_tol {
        Verdict::Converged
    } else {
        Verdict::Undetermined
    };
    Ok(FiniteLength {
        verdict,
        path_length_partial,
        tail,
    })
}

/// Serializable Lyapunov summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSummary {
    pub theta: f64,
    pub monotone: bool,
    pub worst_margin: f64,
    pub identity_max_error: f64,
    pub identity_holds: bool,
    pub obj_increases: usize,
    pub reconciled_increases: usize,
    pub subgradient_bound_violations: usize,
}

/// Summability of both the iterate steps and the extended-point steps of the
/// splitting scheme. Informational: a finite trace cannot refute the
/// implication between the two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPathInfo {
    pub omega_tail: f64,
    pub extended_tail: f64,
    pub extended_path_length: f64,
    pub both_cauchy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsReport {
    pub scheme: Scheme,
    pub steps: usize,
    pub constants: LemmaConstants,
    pub settings: DiagnosticsSettings,
    pub descent_violations: Vec<Violation>,
    pub relerr_violations: Vec<Violation>,
    /// Absent when the noise tail is not square-summable.
    pub lyapunov: Option<LyapunovSummary>,
    pub lyapunov_note: Option<String>,
    pub path_length_partial: Vec<f64>,
    pub path_length: f64,
    pub tail_path_length: f64,
    pub final_witness_norm: f64,
    pub noise_summable: bool,
    pub verdict: Verdict,
    pub extended_path: Option<ExtendedPathInfo>,
}

impl DiagnosticsReport {
    /// No inequality failed.
    pub fn clean(&self) -> bool {
        self.descent_violations.is_empty()
            && self.relerr_violations.is_empty()
            && self
                .lyapunov
                .as_ref()
                .is_none_or(|l| l.monotone && l.identity_holds && l.subgradient_bound_violations == 0)
    }

    /// Whether a run with this report should count as a success.
    pub fn passed(&self, expect_divergence: bool) -> bool {
        if expect_divergence {
            self.verdict == Verdict::Diverged
        } else {
            self.clean() && self.verdict != Verdict::Diverged
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// `(t_k, ξ_k)` per iterate.
pub type Series = (Vec<f64>, Vec<f64>);

/// Runs every check and collects the results, plus `t_k` and `ξ_k` when the
/// noise tail exists.
pub fn full_report_with_series(
    trace: &Trace,
    constants: &LemmaConstants,
    noise: &NoiseModel,
    settings: &DiagnosticsSettings,
) -> Result<(DiagnosticsReport, Option<Series>)> {
    require_steps(trace)?;
    let descent_violations = check_sufficient_descent(trace, constants, settings.tol)?;
    let relerr_violations = check_relative_error(trace, constants, settings.tol)?;
    let params = LyapunovParams::new(settings.theta, constants.b)?;
    let (lyapunov, lyapunov_note, series) = match check_lyapunov(trace, noise, &params, constants, settings.tol) {
        Ok(l) => (
            Some(LyapunovSummary {
                theta: settings.theta,
                monotone: l.monotone,
                worst_margin: l.worst_margin,
                identity_max_error: l.identity_max_error,
                identity_holds: l.identity_max_error <= settings.tol,
                obj_increases: l.obj_increases,
                reconciled_increases: l.reconciled_increases,
                subgradient_bound_violations: l.subgradient_bound_violations,
            }),
            None,
            Some((l.t, l.xi)),
        ),
        Err(Error::NotSummable(m)) => (None, Some(m), None),
        Err(e) => return Err(e),
    };
    let noise_summable = noise.is_summable();
    let fl = check_finite_length(trace, noise_summable, settings)?;
    let extended_path = extended_path(trace, settings);
    let report = DiagnosticsReport {
        scheme: trace.scheme,
        steps: trace.steps(),
        constants: *constants,
        settings: *settings,
        descent_violations,
        relerr_violations,
        lyapunov,
        lyapunov_note,
        path_length: fl.path_length_partial.last().copied().unwrap_or(0.0),
        path_length_partial: fl.path_length_partial,
        tail_path_length: fl.tail,
        final_witness_norm: trace.witness_norm(trace.steps()),
        noise_summable,
        verdict: fl.verdict,
        extended_path,
    };
    Ok((report, series))
}

pub fn full_report(
    trace: &Trace,
    constants: &LemmaConstants,
    noise: &NoiseModel,
    settings: &DiagnosticsSettings,
) -> Result<DiagnosticsReport> {
    full_report_with_series(trace, constants, noise, settings).map(|(r, _)| r)
}

fn extended_path(trace: &Trace, settings: &DiagnosticsSettings) -> Option<ExtendedPathInfo> {
    if trace.scheme != Scheme::Admm {
        return None;
    }
    let steps = trace.steps();
    let d_step = |k: usize| match trace.records[k].extras {
        Extras::Admm { d_step, .. } => d_step,
        _ => 0.0,
    };
    let from = steps.saturating_sub(settings.window.max(1));
    let omega_tail: f64 = (from..steps).map(|k| trace.step_norm(k)).sum();
    let extended_tail: f64 = (from..steps).map(d_step).sum();
    Some(ExtendedPathInfo {
        omega_tail,
        extended_tail,
        extended_path_length: (0..steps).map(d_step).sum(),
        both_cauchy: omega_tail < settings.cauchy_tol && extended_tail < settings.cauchy_tol,
    })
}
