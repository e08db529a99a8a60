//! Problem families consumed by the five solvers, their synthetic generators
//! and a JSON description that regenerates each instance exactly.

mod functions;
mod spec;

use std::sync::Arc;

use ndarray::Array2;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use functions::*;
pub use spec::{PenaltySpec, Problem, ProblemSpec};

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};

/// `F(x) = f(x) + g(x)`.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    pub f: Arc<dyn SmoothFn>,
    pub g: Arc<dyn ProxFn>,
    pub dimension: usize,
}

impl CompositeProblem {
    pub fn new(f: Arc<dyn SmoothFn>, g: Arc<dyn ProxFn>) -> Result<Self> {
        let dimension = f.dim();
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        check_lipschitz_value("f", f.lipschitz())?;
        Ok(Self { f, g, dimension })
    }

    pub fn objective(&self, x: &Vector) -> f64 {
        self.f.eval(x) + self.g.eval(x)
    }
}

/// `Φ(y, z) = f(y) + H(y, z) + g(z)`, with `H` acting on the stacked `(y, z)`.
#[derive(Debug, Clone)]
pub struct BlockProblem {
    pub f: Arc<dyn ProxFn>,
    pub g: Arc<dyn ProxFn>,
    pub coupling: Arc<dyn SmoothFn>,
    /// Lipschitz constant of `∇_y H` in `y`.
    pub m: f64,
    /// Lipschitz constant of `∇_z H` in `z`.
    pub n: f64,
    /// Joint Lipschitz constant of `∇_y H`.
    pub l: f64,
    pub dim_y: usize,
    pub dim_z: usize,
}

impl BlockProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: Arc<dyn ProxFn>,
        g: Arc<dyn ProxFn>,
        coupling: Arc<dyn SmoothFn>,
        m: f64,
        n: f64,
        l: f64,
        dim_y: usize,
        dim_z: usize,
    ) -> Result<Self> {
        if dim_y == 0 || dim_z == 0 {
            return Err(Error::InvalidArgument("block dimensions must be positive".into()));
        }
        if coupling.dim() != dim_y + dim_z {
            return Err(Error::InvalidArgument(format!(
                "coupling acts on {} coordinates, blocks have {} + {}",
                coupling.dim(),
                dim_y,
                dim_z
            )));
        }
        for (name, v) in [("M", m), ("N", n), ("L", l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            f,
            g,
            coupling,
            m,
            n,
            l,
            dim_y,
            dim_z,
        })
    }

    pub fn split(&self, x: &Vector) -> (Vector, Vector) {
        (
            x.slice(ndarray::s![..self.dim_y]).to_owned(),
            x.slice(ndarray::s![self.dim_y..]).to_owned(),
        )
    }

    pub fn objective(&self, y: &Vector, z: &Vector) -> f64 {
        self.f.eval(y) + self.coupling.eval(&linalg::concat(y, z)) + self.g.eval(z)
    }
}

/// `Ψ(x) = f(x) + Σᵢ h(|xᵢ|)`.
///
/// The inner convex function is fixed to `|·|`, so its Lipschitz modulus
/// `d_g` is 1 and its image is `[0, ∞)`. Custom penalties must have `h' > 0`
/// there; the solver re-checks every weight it computes.
#[derive(Debug, Clone)]
pub struct ReweightedProblem {
    pub f: Arc<dyn SmoothFn>,
    pub penalty: Arc<dyn ConcavePenalty>,
    pub dimension: usize,
}

impl ReweightedProblem {
    pub fn new(f: Arc<dyn SmoothFn>, penalty: Arc<dyn ConcavePenalty>) -> Result<Self> {
        let dimension = f.dim();
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        check_lipschitz_value("f", f.lipschitz())?;
        Ok(Self {
            f,
            penalty,
            dimension,
        })
    }

    /// Lipschitz modulus of the inner `|·|`.
    pub fn inner_lipschitz(&self) -> f64 {
        1.0
    }

    pub fn weights(&self, x: &Vector) -> Vector {
        x.mapv(|v| self.penalty.derivative(v.abs()))
    }

    pub fn objective(&self, x: &Vector) -> f64 {
        self.f.eval(x) + x.iter().map(|v| self.penalty.value(v.abs())).sum::<f64>()
    }
}

/// `Ξ(x) = f(x) + g(x) − h(x)` with `h` convex and smooth.
#[derive(Debug, Clone)]
pub struct DcProblem {
    pub f: Arc<dyn SmoothFn>,
    pub g: Arc<dyn ProxFn>,
    pub h: Arc<dyn SmoothFn>,
    pub dimension: usize,
}

impl DcProblem {
    pub fn new(f: Arc<dyn SmoothFn>, g: Arc<dyn ProxFn>, h: Arc<dyn SmoothFn>) -> Result<Self> {
        let dimension = f.dim();
        if dimension == 0 || h.dim() != dimension {
            return Err(Error::InvalidArgument(format!(
                "f and h must share a positive dimension ({} vs {})",
                dimension,
                h.dim()
            )));
        }
        check_lipschitz_value("f", f.lipschitz())?;
        check_lipschitz_value("h", h.lipschitz())?;
        Ok(Self { f, g, h, dimension })
    }

    pub fn objective(&self, x: &Vector) -> f64 {
        self.f.eval(x) + self.g.eval(x) - self.h.eval(x)
    }
}

/// `min f(x) + g(y)` subject to `x + y = 0`, `g` smooth.
#[derive(Debug, Clone)]
pub struct AdmmProblem {
    pub f: Arc<dyn ProxFn>,
    pub g: Arc<dyn ProxSmoothFn>,
    /// `g(y) − σ₀‖∇g(y)‖²` is bounded below.
    pub sigma0: f64,
    pub dimension: usize,
    pub g_convex: bool,
}

impl AdmmProblem {
    pub fn new(f: Arc<dyn ProxFn>, g: Arc<dyn ProxSmoothFn>, sigma0: f64, g_convex: bool) -> Result<Self> {
        let dimension = g.dim();
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma0 must be positive, got {sigma0}")));
        }
        check_lipschitz_value("g", g.lipschitz())?;
        Ok(Self {
            f,
            g,
            sigma0,
            dimension,
            g_convex,
        })
    }

    /// `L_β(x, y, γ) = f(x) + g(y) + ⟨γ, x + y⟩ + (β/2)‖x + y‖²`.
    pub fn augmented_lagrangian(&self, x: &Vector, y: &Vector, dual: &Vector, beta: f64) -> f64 {
        let r = x + y;
        self.f.eval(x) + self.g.eval(y) + dual.dot(&r) + 0.5 * beta * r.dot(&r)
    }
}

fn check_lipschitz_value(name: &str, l: f64) -> Result<()> {
    if l >= 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Lipschitz constant of {name} must be finite and nonnegative, got {l}"
        )))
    }
}

/// Sparse least squares `½‖Ax − y‖² + reg_weight·‖x‖_{1|0}`.
///
/// `A` has i.i.d. standard normal entries; `y = A·x_true + 0.01·noise` where
/// `x_true` has `sparsity` standard normal nonzeros at random positions.
pub fn make_sparse_regression(
    n_rows: usize,
    n_cols: usize,
    sparsity: usize,
    reg_weight: f64,
    reg_kind: RegKind,
    seed: u64,
) -> Result<CompositeProblem> {
    let ls = sparse_least_squares(n_rows, n_cols, sparsity, seed)?;
    if !(reg_weight >= 0.0 && reg_weight.is_finite()) {
        return Err(Error::InvalidArgument(format!("reg_weight must be nonnegative, got {reg_weight}")));
    }
    CompositeProblem::new(Arc::new(ls), regulariser(reg_kind, reg_weight).into())
}

pub(crate) fn sparse_least_squares(
    n_rows: usize,
    n_cols: usize,
    sparsity: usize,
    seed: u64,
) -> Result<LeastSquares> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::InvalidArgument("n_rows and n_cols must be at least 1".into()));
    }
    if sparsity > n_cols {
        return Err(Error::InvalidArgument(format!(
            "sparsity {sparsity} exceeds n_cols {n_cols}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Array2::from_shape_simple_fn((n_rows, n_cols), || StandardNormal.sample(&mut rng));
    let mut x_true = Vector::zeros(n_cols);
    for i in index::sample(&mut rng, n_cols, sparsity) {
        x_true[i] = StandardNormal.sample(&mut rng);
    }
    let noise = Vector::from_shape_simple_fn(n_rows, || {
        0.01 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    });
    let y = a.dot(&x_true) + noise;
    Ok(LeastSquares::new(a, y))
}

/// Quadratic splitting instance `f(x) = ½‖x‖²`, `g(y) = ½‖y − target·𝟙‖²`.
///
/// `g − ½‖∇g‖² ≡ 0`, so `σ₀ = ½`; `L_g = 1`.
pub fn make_admm_quadratic(target: f64, dimension: usize) -> Result<AdmmProblem> {
    if dimension == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    AdmmProblem::new(
        Arc::new(HalfSquaredNorm { scale: 1.0 }),
        Arc::new(Quadratic::new(Vector::from_elem(dimension, target), 1.0)),
        0.5,
        true,
    )
}

/// Block instance `Φ(y, z) = reg(y) + ½‖y − z‖² + (κ/2)‖z − c‖²` with `c`
/// standard normal from `seed`. Constants: `M = 1`, `N = 1 + κ`, `L = √2`.
pub fn make_block_coupling(
    dim: usize,
    kappa: f64,
    reg_weight: f64,
    reg_kind: RegKind,
    seed: u64,
) -> Result<BlockProblem> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchor = Vector::from_shape_simple_fn(dim, || StandardNormal.sample(&mut rng));
    let coupling = CoupledQuadratic::new(anchor, kappa);
    BlockProblem::new(
        regulariser(reg_kind, reg_weight).into(),
        Arc::new(ZeroProx),
        Arc::new(coupling),
        1.0,
        1.0 + kappa,
        std::f64::consts::SQRT_2,
        dim,
        dim,
    )
}

/// Reweighted sparse regression: the least-squares part of
/// [`make_sparse_regression`] with penalty `Σ h(|xᵢ|)`.
pub fn make_reweighted_regression(
    n_rows: usize,
    n_cols: usize,
    sparsity: usize,
    penalty: Arc<dyn ConcavePenalty>,
    seed: u64,
) -> Result<ReweightedProblem> {
    let ls = sparse_least_squares(n_rows, n_cols, sparsity, seed)?;
    ReweightedProblem::new(Arc::new(ls), penalty)
}

/// DC instance `f = (l_f/2)‖x − center‖²`, `h = (l_h/2)‖x‖²`, with `g` the
/// indicator of `[-r, r]ⁿ` when `box_radius` is set and `0` otherwise.
pub fn make_dc_quadratic(
    center: Vector,
    l_f: f64,
    l_h: f64,
    box_radius: Option<f64>,
) -> Result<DcProblem> {
    let dim = center.len();
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(l_f > 0.0) || !(l_h >= 0.0) {
        return Err(Error::InvalidArgument("l_f must be positive and l_h nonnegative".into()));
    }
    let g: Arc<dyn ProxFn> = match box_radius {
        Some(radius) if radius > 0.0 => Arc::new(BoxIndicator { radius }),
        Some(radius) => {
            return Err(Error::InvalidArgument(format!("box radius must be positive, got {radius}")))
        }
        None => Arc::new(ZeroProx),
    };
    DcProblem::new(
        Arc::new(Quadratic::new(center, l_f)),
        g,
        Arc::new(Quadratic::new(Vector::zeros(dim), l_h)),
    )
}

/// Max over coordinates of `|central difference − ∂ᵢf| / (1 + |∂ᵢf|)`.
pub fn check_gradient(f: &dyn SmoothFn, point: &Vector, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !linalg::is_finite(point) {
        return Err(Error::InvalidArgument("point must be finite".into()));
    }
    let grad = f.grad(point);
    let mut worst = 0.0f64;
    let mut probe = point.clone();
    for i in 0..point.len() {
        let orig = probe[i];
        probe[i] = orig + step;
        let up = f.eval(&probe);
        probe[i] = orig - step;
        let down = f.eval(&probe);
        probe[i] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::numeric(format!("non-finite value near coordinate {i}")));
        }
        let fd = (up - down) / (2.0 * step);
        worst = worst.max((fd - grad[i]).abs() / (1.0 + grad[i].abs()));
    }
    Ok(worst)
}

/// Largest `‖∇f(u) − ∇f(v)‖ / ‖u − v‖` over `pairs` random pairs drawn from a
/// centred normal of standard deviation `spread`.
pub fn sampled_lipschitz_ratio(f: &dyn SmoothFn, pairs: usize, spread: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.dim();
    let mut draw = || -> Vector {
        Vector::from_shape_simple_fn(n, || {
            spread * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
        })
    };
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let u = draw();
        let v = draw();
        let d = linalg::dist(&u, &v);
        if d > 0.0 {
            worst = worst.max(linalg::dist(&f.grad(&u), &f.grad(&v)) / d);
        }
    }
    worst
}
