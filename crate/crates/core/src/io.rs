//! JSON problem descriptors.
//!
//! ```json
//! { "n": 2,
//!   "loss": { "family": "logistic", "C": [[1.0, 0.5]], "d": [1.0] },
//!   "penalty": { "family": "scad", "lambda": 1.0, "a": 3.7 },
//!   "domain": { "lower": [-5, -5], "upper": [5, 5] } }
//! ```
//!
//! Matrices are row-major nested arrays.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constrained::{ConvexTerm, LinearlyConstrainedProblem, SaddleProblem};
use crate::error::{Error, Result};
use crate::losses::SmoothLoss;
use crate::penalties::{Penalty, ScalarPenalty};
use crate::problem::{Bounds, ProblemSpec};

pub type Matrix = Vec<Vec<f64>>;

pub fn to_matrix(rows: &Matrix) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn from_matrix(m: &DMatrix<f64>) -> Matrix {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn from_vector(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LossJson {
    Quadratic {
        #[serde(rename = "Q")]
        q_mat: Matrix,
        q: Vec<f64>,
    },
    /// `½(Ax − c)ᵀW(Ax − c) + qᵀx`; `W` defaults to the identity, `q` to zero.
    StructuredComposite {
        #[serde(rename = "A")]
        a: Matrix,
        #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
        weight: Option<Matrix>,
        c: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Vec<f64>>,
    },
    Logistic {
        #[serde(rename = "C")]
        data: Matrix,
        d: Vec<f64>,
    },
    Exponential {
        #[serde(rename = "C")]
        data: Matrix,
        d: Vec<f64>,
    },
    SigmoidNn {
        #[serde(rename = "X")]
        inputs: Matrix,
        y: Vec<f64>,
        hidden: usize,
    },
}

impl LossJson {
    pub fn build(&self) -> Result<SmoothLoss> {
        Ok(match self {
            LossJson::Quadratic { q_mat, q } => SmoothLoss::quadratic(to_matrix(q_mat)?, DVector::from_vec(q.clone())),
            LossJson::StructuredComposite { a, weight, c, q } => {
                let a = to_matrix(a)?;
                let weight = match weight {
                    Some(w) => to_matrix(w)?,
                    None => DMatrix::identity(a.nrows(), a.nrows()),
                };
                let q_vec = q.clone().map_or_else(|| DVector::zeros(a.ncols()), DVector::from_vec);
                SmoothLoss::Composite { a, weight, center: DVector::from_vec(c.clone()), q_vec }
            }
            LossJson::Logistic { data, d } => SmoothLoss::logistic(to_matrix(data)?, DVector::from_vec(d.clone())),
            LossJson::Exponential { data, d } => SmoothLoss::exponential(to_matrix(data)?, DVector::from_vec(d.clone())),
            LossJson::SigmoidNn { inputs, y, hidden } => {
                SmoothLoss::SigmoidNn { inputs: to_matrix(inputs)?, targets: DVector::from_vec(y.clone()), hidden: *hidden }
            }
        })
    }

    pub fn describe(loss: &SmoothLoss) -> Self {
        match loss {
            SmoothLoss::Quadratic { q_mat, q_vec } => LossJson::Quadratic { q_mat: from_matrix(q_mat), q: from_vector(q_vec) },
            SmoothLoss::Composite { a, weight, center, q_vec } => LossJson::StructuredComposite {
                a: from_matrix(a),
                weight: Some(from_matrix(weight)),
                c: from_vector(center),
                q: Some(from_vector(q_vec)),
            },
            SmoothLoss::Logistic { data, labels } => LossJson::Logistic { data: from_matrix(data), d: from_vector(labels) },
            SmoothLoss::Exponential { data, labels } => LossJson::Exponential { data: from_matrix(data), d: from_vector(labels) },
            SmoothLoss::SigmoidNn { inputs, targets, hidden } => {
                LossJson::SigmoidNn { inputs: from_matrix(inputs), y: from_vector(targets), hidden: *hidden }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PenaltyJson {
    Zero,
    L1 { lambda: f64 },
    Scad { lambda: f64, a: f64 },
    Mcp { lambda: f64, a: f64 },
    Negabs { lambda: f64 },
    #[serde(rename = "box")]
    BoxIndicator { lower: f64, upper: f64 },
    GroupLasso { groups: Vec<Vec<usize>>, weights: Vec<f64> },
}

impl PenaltyJson {
    pub fn build(&self, n: usize) -> Result<Penalty> {
        let penalty = match self {
            PenaltyJson::Zero => Penalty::zero(n),
            PenaltyJson::L1 { lambda } => Penalty::l1(n, *lambda),
            PenaltyJson::Scad { lambda, a } => Penalty::scad(n, *lambda, *a),
            PenaltyJson::Mcp { lambda, a } => Penalty::mcp(n, *lambda, *a),
            PenaltyJson::Negabs { lambda } => Penalty::negabs(n, *lambda),
            PenaltyJson::BoxIndicator { lower, upper } => Penalty::box_indicator(n, *lower, *upper),
            PenaltyJson::GroupLasso { groups, weights } => Penalty::group_lasso(groups.clone(), weights.clone())?,
        };
        penalty.validate()?;
        Ok(penalty)
    }

    pub fn describe(penalty: &Penalty) -> Self {
        match penalty {
            Penalty::Separable { phi, .. } => match *phi {
                ScalarPenalty::Zero => PenaltyJson::Zero,
                ScalarPenalty::L1 { lambda } => PenaltyJson::L1 { lambda },
                ScalarPenalty::Scad { lambda, a } => PenaltyJson::Scad { lambda, a },
                ScalarPenalty::Mcp { lambda, a } => PenaltyJson::Mcp { lambda, a },
                ScalarPenalty::NegAbs { lambda } => PenaltyJson::Negabs { lambda },
                ScalarPenalty::Box { lower, upper } => PenaltyJson::BoxIndicator { lower, upper },
            },
            Penalty::GroupLasso { groups, weights, .. } => PenaltyJson::GroupLasso { groups: groups.clone(), weights: weights.clone() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundsJson {
    pub fn build(&self) -> Result<Bounds> {
        Bounds::new(self.lower.clone(), self.upper.clone())
    }

    pub fn describe(b: &Bounds) -> Self {
        BoundsJson { lower: b.lower.clone(), upper: b.upper.clone() }
    }
}

/// A composite problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemJson {
    pub n: usize,
    pub loss: LossJson,
    pub penalty: PenaltyJson,
    /// Box for Lipschitz estimation of losses without a global constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoundsJson>,
}

impl ProblemJson {
    pub fn build(&self) -> Result<(ProblemSpec, Option<Bounds>)> {
        let prob = ProblemSpec::new(self.loss.build()?, self.penalty.build(self.n)?)?;
        if prob.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: prob.n });
        }
        let domain = self.domain.as_ref().map(BoundsJson::build).transpose()?;
        Ok((prob, domain))
    }

    pub fn describe(prob: &ProblemSpec, domain: Option<&Bounds>) -> Self {
        ProblemJson {
            n: prob.n,
            loss: LossJson::describe(&prob.loss),
            penalty: PenaltyJson::describe(&prob.penalty),
            domain: domain.map(BoundsJson::describe),
        }
    }
}

/// A term of a splitting problem: a quadratic or a convex penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermJson {
    Quadratic {
        #[serde(rename = "Q")]
        q_mat: Matrix,
        q: Vec<f64>,
    },
    Penalty {
        n: usize,
        #[serde(flatten)]
        penalty: PenaltyJson,
    },
}

impl TermJson {
    pub fn build(&self) -> Result<ConvexTerm> {
        match self {
            TermJson::Quadratic { q_mat, q } => Ok(ConvexTerm::quadratic(to_matrix(q_mat)?, DVector::from_vec(q.clone()))),
            TermJson::Penalty { n, penalty } => Ok(ConvexTerm::Penalty(penalty.build(*n)?)),
        }
    }
}

/// `min θ₁(x) + θ₂(y)` s.t. `Ax + By = b`, with GPADMM parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmJson {
    pub theta1: TermJson,
    pub theta2: TermJson,
    #[serde(rename = "A")]
    pub a: Matrix,
    #[serde(rename = "B")]
    pub b_mat: Matrix,
    pub b: Vec<f64>,
    pub beta: f64,
    #[serde(rename = "D1", default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<Matrix>,
    #[serde(rename = "D2", default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_set: Option<BoundsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_set: Option<BoundsJson>,
}

impl AdmmJson {
    /// Problem, `D1`, `D2` (zero when absent).
    pub fn build(&self) -> Result<(LinearlyConstrainedProblem, DMatrix<f64>, DMatrix<f64>)> {
        let prob = LinearlyConstrainedProblem::new(
            self.theta1.build()?,
            self.theta2.build()?,
            to_matrix(&self.a)?,
            to_matrix(&self.b_mat)?,
            DVector::from_vec(self.b.clone()),
        )?
        .with_sets(
            self.x_set.as_ref().map(BoundsJson::build).transpose()?,
            self.y_set.as_ref().map(BoundsJson::build).transpose()?,
        )?;
        let (n1, n2, _) = prob.dims();
        let d1 = self.d1.as_ref().map(to_matrix).transpose()?.unwrap_or_else(|| DMatrix::zeros(n1, n1));
        let d2 = self.d2.as_ref().map(to_matrix).transpose()?.unwrap_or_else(|| DMatrix::zeros(n2, n2));
        Ok((prob, d1, d2))
    }
}

/// `min_x max_y φ₁(x) + ⟨y, Kx⟩ − φ₂(y)` with PDHG steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleJson {
    pub phi1: TermJson,
    pub phi2: TermJson,
    #[serde(rename = "K")]
    pub k: Matrix,
    pub tau: f64,
    pub sigma: f64,
}

impl SaddleJson {
    pub fn build(&self) -> Result<SaddleProblem> {
        SaddleProblem::new(self.phi1.build()?, self.phi2.build()?, to_matrix(&self.k)?)
    }
}

/// Any problem file the command line accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnyProblemJson {
    Composite(ProblemJson),
    Admm(AdmmJson),
    Saddle(SaddleJson),
}

pub fn parse_problem(text: &str) -> Result<AnyProblemJson> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A point file: a bare array or `{"x": [...]}`.
pub fn parse_point(text: &str) -> Result<DVector<f64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum PointJson {
        Bare(Vec<f64>),
        Wrapped { x: Vec<f64> },
    }
    let p: PointJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(DVector::from_vec(match p {
        PointJson::Bare(v) | PointJson::Wrapped { x: v } => v,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    #[test]
    fn parses_documented_descriptors() {
        let p: PenaltyJson = serde_json::from_str(r#"{"family":"scad","lambda":1.0,"a":3.7}"#).unwrap();
        assert_eq!(p, PenaltyJson::Scad { lambda: 1.0, a: 3.7 });
        let l: LossJson = serde_json::from_str(r#"{"family":"logistic","C":[[1,2],[3,4]],"d":[1,-1]}"#).unwrap();
        let loss = l.build().unwrap();
        assert_eq!(loss.dim(), 2);
    }

    #[test]
    fn problem_round_trip() {
        let inst = scenarios::table_instance(scenarios::TableCase::ExponentialMcp, 3, 20, 7).unwrap();
        let json = ProblemJson::describe(&inst.problem, inst.domain.as_ref());
        let text = serde_json::to_string(&json).unwrap();
        let AnyProblemJson::Composite(back) = parse_problem(&text).unwrap() else { panic!("wrong kind") };
        let (prob, domain) = back.build().unwrap();
        assert_eq!(prob, inst.problem);
        assert_eq!(domain, inst.domain);
    }

    #[test]
    fn admm_and_saddle_files() {
        let admm = r#"{"theta1":{"Q":[[1]],"q":[0]},"theta2":{"n":1,"family":"l1","lambda":0.5},
                      "A":[[1]],"B":[[-1]],"b":[0],"beta":1.0}"#;
        let AnyProblemJson::Admm(a) = parse_problem(admm).unwrap() else { panic!("wrong kind") };
        let (prob, d1, _) = a.build().unwrap();
        assert_eq!(prob.dims(), (1, 1, 1));
        assert_eq!(d1[(0, 0)], 0.0);
        let saddle = r#"{"phi1":{"Q":[[1]],"q":[0]},"phi2":{"n":1,"family":"box","lower":-1,"upper":1},
                        "K":[[1]],"tau":0.5,"sigma":0.5}"#;
        assert!(matches!(parse_problem(saddle).unwrap(), AnyProblemJson::Saddle(_)));
    }

    #[test]
    fn points_and_errors() {
        assert_eq!(parse_point("[1, 2]").unwrap().len(), 2);
        assert_eq!(parse_point(r#"{"x": [3]}"#).unwrap()[0], 3.0);
        assert!(matches!(parse_problem("{}"), Err(Error::Parse(_))));
        let bad = r#"{"n":2,"loss":{"family":"quadratic","Q":[[1,0],[0]],"q":[0,0]},"penalty":{"family":"zero"}}"#;
        let AnyProblemJson::Composite(p) = parse_problem(bad).unwrap() else { panic!() };
        assert!(p.build().is_err());
    }
}
