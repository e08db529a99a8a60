use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::*;
use crate::error::Result;

/// Concave penalty description for the reweighted family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PenaltySpec {
    Log { scale: f64, eps: f64 },
    Linear { weight: f64 },
}

impl PenaltySpec {
    pub fn build(&self) -> Result<Arc<dyn ConcavePenalty>> {
        match *self {
            PenaltySpec::Log { scale, eps } => {
                if !(scale > 0.0 && eps > 0.0) {
                    return Err(Error::InvalidArgument(
                        "log penalty needs positive scale and eps".into(),
                    ));
                }
                Ok(Arc::new(LogPenalty { scale, eps }))
            }
            PenaltySpec::Linear { weight } => {
                if !(weight > 0.0) {
                    return Err(Error::InvalidArgument("linear penalty weight must be positive".into()));
                }
                Ok(Arc::new(LinearPenalty { weight }))
            }
        }
    }
}

/// Serializable recipe for every shipped instance. Building the same spec
/// twice yields bit-identical problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    SparseRegression {
        n_rows: usize,
        n_cols: usize,
        sparsity: usize,
        reg_weight: f64,
        reg_kind: RegKind,
        seed: u64,
    },
    /// `½‖x − target‖² + reg_weight·‖x‖_{1|0}`; `reg_weight = 0` drops `g`.
    Denoise {
        target: Vec<f64>,
        #[serde(default)]
        reg_weight: f64,
        #[serde(default = "default_reg_kind")]
        reg_kind: RegKind,
    },
    /// `F ≡ 0`, the pure noise-accumulation demo.
    Zero { dimension: usize },
    BlockCoupling {
        dim: usize,
        kappa: f64,
        reg_weight: f64,
        reg_kind: RegKind,
        seed: u64,
    },
    ReweightedRegression {
        n_rows: usize,
        n_cols: usize,
        sparsity: usize,
        penalty: PenaltySpec,
        seed: u64,
    },
    /// `½‖x − target‖² + Σ h(|xᵢ|)`.
    ReweightedDenoise { target: Vec<f64>, penalty: PenaltySpec },
    DcQuadratic {
        center: Vec<f64>,
        l_f: f64,
        l_h: f64,
        #[serde(default)]
        box_radius: Option<f64>,
    },
    AdmmQuadratic { target: f64, dimension: usize },
}

fn default_reg_kind() -> RegKind {
    RegKind::L1
}

/// A built instance, tagged by family.
#[derive(Debug, Clone)]
pub enum Problem {
    Composite(CompositeProblem),
    Block(BlockProblem),
    Reweighted(ReweightedProblem),
    Dc(DcProblem),
    Admm(AdmmProblem),
}

impl Problem {
    pub fn family(&self) -> &'static str {
        match self {
            Problem::Composite(_) => "composite",
            Problem::Block(_) => "block",
            Problem::Reweighted(_) => "reweighted",
            Problem::Dc(_) => "dc",
            Problem::Admm(_) => "admm",
        }
    }
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        Ok(match self {
            ProblemSpec::SparseRegression {
                n_rows,
                n_cols,
                sparsity,
                reg_weight,
                reg_kind,
                seed,
            } => Problem::Composite(make_sparse_regression(
                *n_rows,
                *n_cols,
                *sparsity,
                *reg_weight,
                *reg_kind,
                *seed,
            )?),
            ProblemSpec::Denoise {
                target,
                reg_weight,
                reg_kind,
            } => {
                let g: Arc<dyn ProxFn> = if *reg_weight == 0.0 {
                    Arc::new(ZeroProx)
                } else {
                    regulariser(*reg_kind, *reg_weight).into()
                };
                Problem::Composite(CompositeProblem::new(
                    Arc::new(Quadratic::new(Vector::from(target.clone()), 1.0)),
                    g,
                )?)
            }
            ProblemSpec::Zero { dimension } => Problem::Composite(CompositeProblem::new(
                Arc::new(Quadratic::zero(*dimension)),
                Arc::new(ZeroProx),
            )?),
            ProblemSpec::BlockCoupling {
                dim,
                kappa,
                reg_weight,
                reg_kind,
                seed,
            } => Problem::Block(make_block_coupling(*dim, *kappa, *reg_weight, *reg_kind, *seed)?),
            ProblemSpec::ReweightedRegression {
                n_rows,
                n_cols,
                sparsity,
                penalty,
                seed,
            } => Problem::Reweighted(make_reweighted_regression(
                *n_rows,
                *n_cols,
                *sparsity,
                penalty.build()?,
                *seed,
            )?),
            ProblemSpec::ReweightedDenoise { target, penalty } => {
                Problem::Reweighted(ReweightedProblem::new(
                    Arc::new(Quadratic::new(Vector::from(target.clone()), 1.0)),
                    penalty.build()?,
                )?)
            }
            ProblemSpec::DcQuadratic {
                center,
                l_f,
                l_h,
                box_radius,
            } => Problem::Dc(make_dc_quadratic(Vector::from(center.clone()), *l_f, *l_h, *box_radius)?),
            ProblemSpec::AdmmQuadratic { target, dimension } => {
                Problem::Admm(make_admm_quadratic(*target, *dimension)?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_regenerates_problem() {
        let spec = ProblemSpec::SparseRegression {
            n_rows: 6,
            n_cols: 9,
            sparsity: 2,
            reg_weight: 0.3,
            reg_kind: RegKind::L0,
            seed: 5,
        };
        let back = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        let (Problem::Composite(a), Problem::Composite(b)) = (spec.build().unwrap(), back.build().unwrap())
        else {
            panic!("wrong family");
        };
        let x = Vector::linspace(-1.0, 1.0, 9);
        assert_eq!(a.objective(&x).to_bits(), b.objective(&x).to_bits());
        assert_eq!(a.f.lipschitz().to_bits(), b.f.lipschitz().to_bits());
    }

    #[test]
    fn tagged_json_shape() {
        let spec = ProblemSpec::AdmmQuadratic {
            target: 1.0,
            dimension: 1,
        };
        let v: serde_json::Value = serde_json::from_str(&spec.to_json()).unwrap();
        assert_eq!(v["kind"], "admm_quadratic");
        assert!(ProblemSpec::from_json("{\"kind\": \"nope\"}").is_err());
    }
}
