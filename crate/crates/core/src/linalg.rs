//! Small dense helpers shared by the problem generators and the solvers.

use ndarray::{Array1, Array2};

pub type Vector = Array1<f64>;

pub fn norm(x: &Vector) -> f64 {
    x.dot(x).sqrt()
}

pub fn dist(x: &Vector, y: &Vector) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn concat(a: &Vector, b: &Vector) -> Vector {
    a.iter().chain(b.iter()).copied().collect()
}

pub fn is_finite(x: &Vector) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Largest eigenvalue of `AᵀA` by power iteration on the Gram matrix.
///
/// Stops once successive Rayleigh quotients agree to relative `tol` or after
/// `max_iters` sweeps. The start vector is all ones, which keeps the result
/// a pure function of `a`.
pub fn gram_lambda_max(a: &Array2<f64>, tol: f64, max_iters: usize) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let gram = a.t().dot(a);
    let mut v = Vector::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..max_iters {
        let w = gram.dot(&v);
        let w_norm = norm(&w);
        if w_norm == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / w_norm;
        if (next - lambda).abs() <= tol * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // one last Rayleigh quotient with the normalised vector
    let rq = v.dot(&gram.dot(&v));
    rq.max(lambda)
}
