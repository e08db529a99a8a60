//! Closed-form proximal maps and the brute-force grid oracle used to check them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Selection rule when the nonconvex prox has two minimisers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    Keep,
    #[default]
    Zero,
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Soft thresholding: `sign(xᵢ)·max(|xᵢ| − tau, 0)`.
pub fn prox_l1(x: &Vector, tau: f64) -> Vector {
    x.mapv(|v| soft_threshold(v, tau))
}

/// Hard thresholding for `tau·‖·‖₀`.
///
/// Each coordinate picks the cheaper of the two candidates `xᵢ` (cost `tau`)
/// and `0` (cost `xᵢ²/2`); on an exact tie `tie` decides. This is the
/// `|xᵢ| ≷ √(2·tau)` rule evaluated without a square root.
pub fn prox_l0(x: &Vector, tau: f64, tie: TiePolicy) -> Vector {
    x.mapv(|v| {
        let zero_cost = 0.5 * v * v;
        if zero_cost > tau {
            v
        } else if zero_cost < tau {
            0.0
        } else {
            match tie {
                TiePolicy::Keep => v,
                TiePolicy::Zero => 0.0,
            }
        }
    })
}

/// Per-coordinate soft thresholding with threshold `tau·wᵢ`.
pub fn prox_weighted_l1(x: &Vector, weights: &Vector, tau: f64) -> Result<Vector> {
    if weights.len() != x.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} coordinates",
            weights.len(),
            x.len()
        )));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
        return Err(Error::InvalidArgument(format!("weight {i} is {w}, must be positive")));
    }
    Ok(ndarray::Zip::from(x)
        .and(weights)
        .map_collect(|&v, &w| soft_threshold(v, tau * w)))
}

/// Grid minimiser of `J(y) + (y − x)²/2` over `grid_points` uniform points of
/// `[lo, hi]`. Ground truth for tests only.
///
/// `J` may return `+∞` (indicator functions); NaN or `−∞` is a numeric failure.
pub fn prox_oracle<J>(j: J, x: f64, lo: f64, hi: f64, grid_points: usize) -> Result<f64>
where
    J: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if grid_points < 3 {
        return Err(Error::InvalidArgument("grid_points must be at least 3".into()));
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..grid_points {
        let y = lo + step * i as f64;
        let jy = j(y);
        if jy.is_nan() || jy == f64::NEG_INFINITY {
            return Err(Error::numeric(format!("J({y}) = {jy}")));
        }
        let val = jy + 0.5 * (y - x) * (y - x);
        if val < best.0 {
            best = (val, y);
        }
    }
    if best.0.is_infinite() {
        return Err(Error::numeric("J is +∞ on the whole grid"));
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn l1_examples() {
        assert_eq!(prox_l1(&array![3.0, -0.5], 1.0), array![2.0, 0.0]);
        assert_eq!(prox_l1(&array![0.0], 1.0), array![0.0]);
        let x = array![0.3, -2.5, 1e-3];
        let z = prox_l1(&x, 1e-12);
        for (a, b) in x.iter().zip(z.iter()) {
            assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn l0_examples() {
        assert_eq!(prox_l0(&array![3.0, 0.5], 1.0, TiePolicy::Zero), array![3.0, 0.0]);
        assert_eq!(prox_l0(&array![0.0], 1.0, TiePolicy::Keep), array![0.0]);
        // |x| = √(2·2) = 2 exactly
        assert_eq!(prox_l0(&array![2.0], 2.0, TiePolicy::Keep), array![2.0]);
        assert_eq!(prox_l0(&array![-2.0], 2.0, TiePolicy::Zero), array![0.0]);
        let keep_cost = 2.0 + 0.0;
        let zero_cost = 0.5 * 2.0f64 * 2.0;
        assert!((keep_cost - zero_cost).abs() <= 1e-12);
    }

    #[test]
    fn weighted_l1_examples() {
        let z = prox_weighted_l1(&array![3.0, 3.0], &array![1.0, 0.1], 1.0).unwrap();
        assert_eq!(z[0], 2.0);
        assert!((z[1] - 2.9).abs() < 1e-15);
        let x = array![1.5, -0.2, 4.0];
        assert_eq!(
            prox_weighted_l1(&x, &Vector::ones(3), 0.7).unwrap(),
            prox_l1(&x, 0.7)
        );
        assert!(matches!(
            prox_weighted_l1(&x, &array![1.0, 0.0, 1.0], 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn grid_oracle_examples() {
        let y = prox_oracle(|y: f64| y.abs(), 3.0, -5.0, 5.0, 1_000_001).unwrap();
        assert!((y - 2.0).abs() <= 1e-5);
        let y = prox_oracle(|_| 0.0, 0.37, -1.0, 1.0, 2001).unwrap();
        assert!((y - 0.37).abs() <= 1e-3);
        let box01 = |y: f64| if (0.0..=1.0).contains(&y) { 0.0 } else { f64::INFINITY };
        let y = prox_oracle(box01, 2.0, -3.0, 3.0, 601).unwrap();
        assert!((y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_oracle_errors() {
        assert!(prox_oracle(|_| 0.0, 0.0, 1.0, 1.0, 10).is_err());
        assert!(prox_oracle(|_| 0.0, 0.0, 0.0, 1.0, 2).is_err());
        assert!(matches!(
            prox_oracle(|_| f64::NAN, 0.0, 0.0, 1.0, 5),
            Err(Error::NumericFailure { .. })
        ));
    }
}
