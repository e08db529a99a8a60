//! Function oracles: smooth parts with a gradient and Lipschitz constant,
//! nonsmooth parts with a proximal map, and the scalar concave penalties used
//! by the reweighted scheme.

use std::fmt::Debug;

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Vector};
use crate::oracles::{self, TiePolicy};

/// Differentiable function with an `L`-Lipschitz gradient.
pub trait SmoothFn: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Vector) -> f64;
    fn grad(&self, x: &Vector) -> Vector;
    /// Lipschitz constant of `grad`, fixed at construction.
    fn lipschitz(&self) -> f64;
}

/// Closed, possibly nonconvex function with a computable proximal map.
///
/// `prox(x, step)` returns a point of `argmin_y step·J(y) + ‖y − x‖²/2`.
/// Separable shipped functions are dimension agnostic.
pub trait ProxFn: Debug + Send + Sync {
    /// May return `f64::INFINITY` outside the domain.
    fn eval(&self, x: &Vector) -> f64;
    fn prox(&self, x: &Vector, step: f64) -> Vector;
    fn is_convex(&self) -> bool;
}

/// Smooth function that also has a closed-form proximal map.
pub trait ProxSmoothFn: SmoothFn {
    fn prox(&self, x: &Vector, step: f64) -> Vector;
}

/// Scalar concave differentiable penalty `h` composed with `|·|` in the
/// reweighted model.
pub trait ConcavePenalty: Debug + Send + Sync {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
    /// Lipschitz constant of `derivative`.
    fn derivative_lipschitz(&self) -> f64;
}

/// `f(x) = ½‖Ax − y‖²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: Array2<f64>,
    y: Vector,
    lipschitz: f64,
}

impl LeastSquares {
    /// Lipschitz constant is `λ_max(AᵀA)` by power iteration (rel. tol 1e-8).
    pub fn new(a: Array2<f64>, y: Vector) -> Self {
        assert_eq!(a.nrows(), y.len(), "row count must match observation length");
        let lipschitz = linalg::gram_lambda_max(&a, 1e-8, 10_000);
        Self { a, y, lipschitz }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn observations(&self) -> &Vector {
        &self.y
    }

    fn residual(&self, x: &Vector) -> Vector {
        self.a.dot(x) - &self.y
    }
}

impl SmoothFn for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn eval(&self, x: &Vector) -> f64 {
        let r = self.residual(x);
        0.5 * r.dot(&r)
    }

    fn grad(&self, x: &Vector) -> Vector {
        self.a.t().dot(&self.residual(x))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `f(x) = (scale/2)‖x − center‖²`. `scale = 0` gives the zero function.
#[derive(Debug, Clone)]
pub struct Quadratic {
    center: Vector,
    scale: f64,
}

impl Quadratic {
    pub fn new(center: Vector, scale: f64) -> Self {
        assert!(scale >= 0.0 && scale.is_finite());
        Self { center, scale }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(Vector::zeros(dim), 0.0)
    }
}

impl SmoothFn for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &Vector) -> f64 {
        let d = x - &self.center;
        0.5 * self.scale * d.dot(&d)
    }

    fn grad(&self, x: &Vector) -> Vector {
        (x - &self.center) * self.scale
    }

    fn lipschitz(&self) -> f64 {
        self.scale
    }
}

impl ProxSmoothFn for Quadratic {
    fn prox(&self, x: &Vector, step: f64) -> Vector {
        let t = step * self.scale;
        (x + &(&self.center * t)) / (1.0 + t)
    }
}

/// Block coupling `H(y, z) = ½‖y − z‖² + (κ/2)‖z − anchor‖²` over the
/// stacked vector `(y, z)`.
///
/// Partial constants: `∇_y H` is 1-Lipschitz in `y` and √2-Lipschitz jointly;
/// `∇_z H` is `(1 + κ)`-Lipschitz in `z`.
#[derive(Debug, Clone)]
pub struct CoupledQuadratic {
    anchor: Vector,
    kappa: f64,
}

impl CoupledQuadratic {
    pub fn new(anchor: Vector, kappa: f64) -> Self {
        assert!(kappa >= 0.0 && kappa.is_finite());
        Self { anchor, kappa }
    }

    pub fn block_dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl SmoothFn for CoupledQuadratic {
    fn dim(&self) -> usize {
        2 * self.anchor.len()
    }

    fn eval(&self, x: &Vector) -> f64 {
        let n = self.anchor.len();
        let y = x.slice(s![..n]);
        let z = x.slice(s![n..]);
        let d = &y - &z;
        let a = &z - &self.anchor;
        0.5 * d.dot(&d) + 0.5 * self.kappa * a.dot(&a)
    }

    fn grad(&self, x: &Vector) -> Vector {
        let n = self.anchor.len();
        let y = x.slice(s![..n]);
        let z = x.slice(s![n..]);
        let d = &y - &z;
        let gz = -&d + (&z - &self.anchor) * self.kappa;
        linalg::concat(&d, &gz)
    }

    fn lipschitz(&self) -> f64 {
        // Hessian [[I, -I], [-I, (1+κ)I]]
        let k = self.kappa;
        0.5 * (2.0 + k + (k * k + 4.0).sqrt())
    }
}

/// `J ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroProx;

impl ProxFn for ZeroProx {
    fn eval(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn prox(&self, x: &Vector, _step: f64) -> Vector {
        x.clone()
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `J(x) = weight·‖x‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub weight: f64,
}

impl ProxFn for L1Norm {
    fn eval(&self, x: &Vector) -> f64 {
        // summed term by term so that Σ w·|xᵢ| matches the reweighted objective
        x.iter().map(|v| self.weight * v.abs()).sum()
    }

    fn prox(&self, x: &Vector, step: f64) -> Vector {
        oracles::prox_l1(x, step * self.weight)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `J(x) = weight·‖x‖₀`, counting exact zeros.
#[derive(Debug, Clone, Copy)]
pub struct L0Norm {
    pub weight: f64,
    pub tie: TiePolicy,
}

impl ProxFn for L0Norm {
    fn eval(&self, x: &Vector) -> f64 {
        self.weight * x.iter().filter(|v| **v != 0.0).count() as f64
    }

    fn prox(&self, x: &Vector, step: f64) -> Vector {
        oracles::prox_l0(x, step * self.weight, self.tie)
    }

    fn is_convex(&self) -> bool {
        false
    }
}

/// `J(x) = (scale/2)‖x‖²`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSquaredNorm {
    pub scale: f64,
}

impl ProxFn for HalfSquaredNorm {
    fn eval(&self, x: &Vector) -> f64 {
        0.5 * self.scale * x.dot(x)
    }

    fn prox(&self, x: &Vector, step: f64) -> Vector {
        x / (1.0 + step * self.scale)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// Indicator of the box `[-radius, radius]ⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndicator {
    pub radius: f64,
}

impl ProxFn for BoxIndicator {
    fn eval(&self, x: &Vector) -> f64 {
        if x.iter().all(|v| v.abs() <= self.radius) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, x: &Vector, _step: f64) -> Vector {
        x.mapv(|v| v.clamp(-self.radius, self.radius))
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `h(s) = scale·ln(1 + s/eps)`; `h'(s) = scale/(eps + s)`.
#[derive(Debug, Clone, Copy)]
pub struct LogPenalty {
    pub scale: f64,
    pub eps: f64,
}

impl ConcavePenalty for LogPenalty {
    fn value(&self, s: f64) -> f64 {
        self.scale * (s / self.eps).ln_1p()
    }

    fn derivative(&self, s: f64) -> f64 {
        self.scale / (self.eps + s)
    }

    fn derivative_lipschitz(&self) -> f64 {
        // |h''| is largest at s = 0 on the nonnegative image of |·|
        self.scale / (self.eps * self.eps)
    }
}

/// `h(s) = weight·s`; constant weights.
#[derive(Debug, Clone, Copy)]
pub struct LinearPenalty {
    pub weight: f64,
}

impl ConcavePenalty for LinearPenalty {
    fn value(&self, s: f64) -> f64 {
        self.weight * s
    }

    fn derivative(&self, _s: f64) -> f64 {
        self.weight
    }

    fn derivative_lipschitz(&self) -> f64 {
        0.0
    }
}

/// Regulariser selector used by the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    L1,
    L0,
}

pub(crate) fn regulariser(kind: RegKind, weight: f64) -> Box<dyn ProxFn> {
    match kind {
        RegKind::L1 => Box::new(L1Norm { weight }),
        RegKind::L0 => Box::new(L0Norm {
            weight,
            tie: TiePolicy::Zero,
        }),
    }
}
