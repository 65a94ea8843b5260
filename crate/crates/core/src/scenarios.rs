//! Ready-made problem instances: the worked SCAD example with exponential
//! loss, the sparse-classification scenarios, LASSO, a rank-deficient group
//! LASSO and a battery of negative-`ℓ₁` problems.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calmness::{Condition, Verdict};
use crate::error::{Error, Result};
use crate::losses::SmoothLoss;
use crate::penalties::Penalty;
use crate::problem::{Bounds, ProblemSpec};

/// Points of the exponential + SCAD example, `f(z) = exp(−bᵀz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleCase {
    /// Both coordinates at the kink, `e·b₂ = λ`: isolated calmness.
    #[serde(rename = "i")]
    KinkCorner,
    /// `z̄₂` on the slanted SCAD piece with generic `b₂`.
    #[serde(rename = "ii")]
    Slanted,
    /// `z̄₂` on the slanted piece with `b₂ = 1/(aλ − z̄₂)`.
    #[serde(rename = "ii-degenerate")]
    SlantedDegenerate,
    /// `z̄₂` inside the flat piece: NNAMCQ.
    #[serde(rename = "iii")]
    Flat,
}

impl ExampleCase {
    pub const ALL: [ExampleCase; 4] = [ExampleCase::KinkCorner, ExampleCase::Slanted, ExampleCase::SlantedDegenerate, ExampleCase::Flat];

    pub fn label(self) -> &'static str {
        match self {
            ExampleCase::KinkCorner => "i",
            ExampleCase::Slanted => "ii",
            ExampleCase::SlantedDegenerate => "ii-degenerate",
            ExampleCase::Flat => "iii",
        }
    }

    /// Conditions (any of) and verdict the analysis predicts.
    pub fn expected(self) -> (&'static [Condition], Verdict) {
        match self {
            ExampleCase::KinkCorner => (&[Condition::IsolatedCalmness], Verdict::Holds),
            // with no critical direction FOSCMS holds vacuously
            ExampleCase::Slanted => (&[Condition::Foscms, Condition::IsolatedCalmness], Verdict::Holds),
            ExampleCase::SlantedDegenerate => (&[Condition::Foscms], Verdict::Inconclusive),
            ExampleCase::Flat => (&[Condition::Nnamcq], Verdict::Holds),
        }
    }

    pub fn expected_text(self) -> &'static str {
        match self {
            ExampleCase::KinkCorner => "isolated calm",
            ExampleCase::Slanted => "FOSCMS holds (calm)",
            ExampleCase::SlantedDegenerate => "FOSCMS inconclusive (nonzero multiplier survives)",
            ExampleCase::Flat => "NNAMCQ holds",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleInstance {
    pub case: ExampleCase,
    pub problem: ProblemSpec,
    pub point: DVector<f64>,
    pub b: DVector<f64>,
    pub lambda: f64,
    pub a: f64,
}

impl ExampleInstance {
    /// `exp(−bᵀz̄)`.
    pub fn scale(&self) -> f64 {
        (-self.b.dot(&self.point)).exp()
    }

    /// `(z̄ᵢ, −∂ᵢf(z̄)) = (z̄ᵢ, e·bᵢ)`.
    pub fn graph_point(&self, i: usize) -> [f64; 2] {
        [self.point[i], self.scale() * self.b[i]]
    }
}

/// Smallest positive root of `t·exp(−c t) = target`, `0 < target < 1/(c e)`.
pub fn solve_weighted_exponential(c: f64, target: f64) -> Result<f64> {
    let g = |t: f64| t * (-c * t).exp() - target;
    let (mut lo, mut hi) = (0.0, 1.0 / c);
    if !(g(hi) > 0.0) {
        return Err(Error::InvalidConfig(format!("t exp(-{c} t) = {target} has no root")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn exponential_scad(b: &DVector<f64>, lambda: f64, a: f64) -> Result<ProblemSpec> {
    let data = DMatrix::from_row_slice(1, b.len(), b.as_slice());
    ProblemSpec::new(SmoothLoss::exponential(data, DVector::from_element(1, 1.0)), Penalty::scad(b.len(), lambda, a))
}

/// Builds a concrete instance of each case by solving its defining equations.
pub fn example_instance(case: ExampleCase) -> Result<ExampleInstance> {
    let a = 3.0;
    let (lambda, point, b) = match case {
        ExampleCase::KinkCorner => {
            let lambda = 1.0;
            // z̄ = 0, so e = 1: e·b₁ ∈ (−λ, λ), e·b₂ = λ
            (lambda, DVector::from_row_slice(&[0.0, 0.0]), DVector::from_row_slice(&[0.5 * lambda, lambda]))
        }
        ExampleCase::Slanted => {
            let (lambda, z2) = (0.1, 0.2);
            let b2 = solve_weighted_exponential(z2, (a * lambda - z2) / (a - 1.0))?;
            let e = (-b2 * z2).exp();
            (lambda, DVector::from_row_slice(&[0.0, z2]), DVector::from_row_slice(&[-lambda / e, b2]))
        }
        ExampleCase::SlantedDegenerate => {
            // s = aλ − z̄₂ with b₂ = 1/s forces z̄₂ = −s·ln(s²/(a−1))
            let s: f64 = 0.5;
            let z2 = -s * (s * s / (a - 1.0)).ln();
            let lambda = (z2 + s) / a;
            let b2 = 1.0 / s;
            let e = (-b2 * z2).exp();
            (lambda, DVector::from_row_slice(&[0.0, z2]), DVector::from_row_slice(&[-lambda / e, b2]))
        }
        ExampleCase::Flat => {
            let (lambda, z2) = (1.0, 0.2);
            let b2 = solve_weighted_exponential(z2, lambda)?;
            (lambda, DVector::from_row_slice(&[0.0, z2]), DVector::from_row_slice(&[0.5 * b2, b2]))
        }
    };
    let problem = exponential_scad(&b, lambda, a)?;
    Ok(ExampleInstance { case, problem, point, b, lambda, a })
}

/// The four sparse-classification scenarios numbered 5–8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableCase {
    LogisticScad = 5,
    ExponentialScad = 6,
    LogisticMcp = 7,
    ExponentialMcp = 8,
}

impl TableCase {
    pub fn from_number(k: u32) -> Result<Self> {
        match k {
            5 => Ok(TableCase::LogisticScad),
            6 => Ok(TableCase::ExponentialScad),
            7 => Ok(TableCase::LogisticMcp),
            8 => Ok(TableCase::ExponentialMcp),
            _ => Err(Error::InvalidConfig(format!("unknown scenario {k}; expected 5, 6, 7 or 8"))),
        }
    }

    pub fn is_exponential(self) -> bool {
        matches!(self, TableCase::ExponentialScad | TableCase::ExponentialMcp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInstance {
    pub problem: ProblemSpec,
    /// Box over which a Lipschitz constant is taken when none is global.
    pub domain: Option<Bounds>,
    pub x0: DVector<f64>,
}

/// A share of the rows (`1/pair_div` pairs) come in exact antipodal pairs sharing a label, which
/// keeps the data non-separable so the loss is bounded below; the rest follow
/// a planted linear model with label noise.
fn paired_classification_data(rng: &mut ChaCha8Rng, samples: usize, n: usize, pair_div: usize, noise: f64) -> (DMatrix<f64>, DVector<f64>) {
    let pairs = (samples / pair_div).max(n);
    let planted = samples.saturating_sub(2 * pairs).max(n);
    let truth = DVector::from_fn(n, |j, _| if j % 2 == 0 { rng.gen_range(-2.0..2.0) } else { 0.0 });
    let rows = 2 * pairs + planted;
    let mut data = DMatrix::zeros(rows, n);
    let mut labels = DVector::zeros(rows);
    for i in 0..pairs {
        let d = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        for j in 0..n {
            let c = rng.gen_range(-1.0..1.0);
            data[(2 * i, j)] = c;
            data[(2 * i + 1, j)] = -c;
        }
        labels[2 * i] = d;
        labels[2 * i + 1] = d;
    }
    for i in 2 * pairs..rows {
        for j in 0..n {
            data[(i, j)] = rng.gen_range(-1.0..1.0);
        }
        let margin = data.row(i).transpose().dot(&truth);
        let flip = rng.gen_bool(noise);
        labels[i] = if (margin >= 0.0) != flip { 1.0 } else { -1.0 };
    }
    (data, labels)
}

/// Random instance of scenario `case`.
pub fn table_instance(case: TableCase, n: usize, samples: usize, seed: u64) -> Result<ScenarioInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // the exponential loss gets a heavier antipodal share and noisier labels so
    // its minimizers sit well inside the box that scopes L
    let (pair_div, noise) = if case.is_exponential() { (3, 0.3) } else { (8, 0.1) };
    let (data, labels) = paired_classification_data(&mut rng, samples, n, pair_div, noise);
    let scale = 1.0 / data.nrows() as f64;
    let data = data * scale.sqrt();
    let (loss, domain) = if case.is_exponential() {
        // exp(−d c x) with rows scaled by √(1/N) stays well conditioned on the box
        (SmoothLoss::exponential(data, labels), Some(Bounds::uniform(n, -5.0, 5.0)))
    } else {
        (SmoothLoss::logistic(data, labels), None)
    };
    let penalty = match case {
        TableCase::LogisticScad | TableCase::ExponentialScad => Penalty::scad(n, 0.05, 3.7),
        TableCase::LogisticMcp | TableCase::ExponentialMcp => Penalty::mcp(n, 0.05, 3.0),
    };
    let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    Ok(ScenarioInstance { problem: ProblemSpec::new(loss, penalty)?, domain, x0 })
}

fn gaussian_like(rng: &mut ChaCha8Rng) -> f64 {
    // Irwin–Hall approximation, plenty for test data
    (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0
}

/// `½‖Ax − c‖² + λ‖x‖₁` with random `A ∈ ℝ^{m×n}`.
pub fn lasso_instance(m: usize, n: usize, lambda: f64, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(m, n, |_, _| gaussian_like(&mut rng) / (m as f64).sqrt());
    let c = DVector::from_fn(m, |_, _| gaussian_like(&mut rng));
    ProblemSpec::new(SmoothLoss::least_squares(a, c), Penalty::l1(n, lambda))
}

/// Least squares plus group LASSO whose solution set is unbounded: the first
/// group carries weight zero and its two columns of `A` coincide, so the loss
/// is constant along `(t, −t, 0, …)`.
pub fn rank_deficient_group_lasso(m: usize, groups: usize, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * groups;
    let mut a = DMatrix::from_fn(m, n, |_, _| gaussian_like(&mut rng) / (m as f64).sqrt());
    for i in 0..m {
        a[(i, 1)] = a[(i, 0)];
    }
    let c = DVector::from_fn(m, |_, _| gaussian_like(&mut rng));
    let group_list: Vec<Vec<usize>> = (0..groups).map(|g| vec![2 * g, 2 * g + 1]).collect();
    let weights: Vec<f64> = (0..groups).map(|g| if g == 0 { 0.0 } else { 0.3 }).collect();
    ProblemSpec::new(SmoothLoss::least_squares(a, c), Penalty::group_lasso(group_list, weights)?)
}

/// Random quadratic + group LASSO, `Q = MᵀM/m + μI`.
pub fn quadratic_group_lasso(n_groups: usize, group_size: usize, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_groups * group_size;
    let m = DMatrix::from_fn(n + 2, n, |_, _| gaussian_like(&mut rng));
    let q = m.transpose() * &m / (n + 2) as f64 + DMatrix::identity(n, n) * 0.1;
    let q_vec = DVector::from_fn(n, |_, _| gaussian_like(&mut rng));
    let groups = (0..n_groups).map(|g| (g * group_size..(g + 1) * group_size).collect()).collect();
    let weights = (0..n_groups).map(|_| rng.gen_range(0.2..1.0)).collect();
    ProblemSpec::new(SmoothLoss::quadratic(q, q_vec), Penalty::group_lasso(groups, weights)?)
}

/// Random quadratic + `ℓ₁`.
pub fn quadratic_l1(n: usize, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n + 2, n, |_, _| gaussian_like(&mut rng));
    let q = m.transpose() * &m / (n + 2) as f64 + DMatrix::identity(n, n) * 0.1;
    let q_vec = DVector::from_fn(n, |_, _| gaussian_like(&mut rng));
    ProblemSpec::new(SmoothLoss::quadratic(q, q_vec), Penalty::l1(n, rng.gen_range(0.1..1.0)))
}

/// One member of the negative-`ℓ₁` battery:
/// `F(x) = Σ ½qᵢ(xᵢ − cᵢ)² − λ‖x‖₁` with `cᵢ = ±λ/qᵢ`, which makes the origin
/// limiting-stationary but never proximal-stationary.
#[derive(Debug, Clone, PartialEq)]
pub struct NegAbsInstance {
    pub problem: ProblemSpec,
    pub curvature: Vec<f64>,
    pub lambda: f64,
}

impl NegAbsInstance {
    pub fn lipschitz(&self) -> f64 {
        self.curvature.iter().copied().fold(0.0, f64::max)
    }
}

pub fn negabs_battery() -> Result<Vec<NegAbsInstance>> {
    (0..10)
        .map(|i| {
            let n = 1 + i % 2;
            let lambda = 0.5 + 0.25 * (i / 2) as f64;
            let curvature: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * ((i + j) % 3) as f64).collect();
            let q_mat = DMatrix::from_diagonal(&DVector::from_row_slice(&curvature));
            // ∇f(x) = Q(x − c), so q = −Qc = ∓λ per coordinate
            let q_vec = DVector::from_fn(n, |j, _| if (i + j) % 2 == 0 { -lambda } else { lambda });
            let problem = ProblemSpec::new(SmoothLoss::quadratic(q_mat, q_vec), Penalty::negabs(n, lambda))?;
            Ok(NegAbsInstance { problem, curvature, lambda })
        })
        .collect()
}

/// Uniform random start in `[−r, r]ⁿ`.
pub fn random_start(n: usize, r: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-r..r))
}
