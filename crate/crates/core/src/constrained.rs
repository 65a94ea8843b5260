//! Generalized proximal ADMM for `min θ₁(x) + θ₂(y)` s.t. `Ax + By = b`, and
//! PDHG for `min_x max_y φ₁(x) + ⟨y, Kx⟩ − φ₂(y)`.
//!
//! Both solvers record the perturbation `p^k = w^k − w^{k+1}` and check at
//! every step that `H p^k` lies in the KKT map evaluated at `w^{k+1}`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::interval::IntervalSet;
use crate::linalg;
use crate::penalties::Penalty;
use crate::problem::{Bounds, SolverConfig};
use crate::trace::fmt_f64;

/// Default tolerance of the per-step inclusion check.
pub const INCLUSION_TOL: f64 = 1e-8;

/// A convex term of a splitting problem.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexTerm {
    /// `½xᵀQx + qᵀx` with `Q` positive semidefinite.
    Quadratic { q_mat: DMatrix<f64>, q_vec: DVector<f64> },
    /// A convex penalty with a closed-form prox.
    Penalty(Penalty),
}

impl ConvexTerm {
    pub fn quadratic(q_mat: DMatrix<f64>, q_vec: DVector<f64>) -> Self {
        ConvexTerm::Quadratic { q_mat, q_vec }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexTerm::Quadratic { q_vec, .. } => q_vec.len(),
            ConvexTerm::Penalty(p) => p.dim(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexTerm::Quadratic { q_mat, q_vec } => {
                if q_mat.nrows() != q_vec.len() || !q_mat.is_square() {
                    return Err(Error::DimensionMismatch { expected: q_vec.len(), got: q_mat.nrows() });
                }
                if !linalg::is_psd(q_mat) {
                    return Err(Error::InvalidConfig("quadratic term must be symmetric PSD".into()));
                }
                Ok(())
            }
            ConvexTerm::Penalty(p) => {
                p.validate()?;
                if !p.is_convex() {
                    return Err(Error::InvalidConfig("splitting terms must be convex".into()));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            ConvexTerm::Quadratic { q_mat, q_vec } => 0.5 * x.dot(&(q_mat * x)) + q_vec.dot(x),
            ConvexTerm::Penalty(p) => p.value(x),
        }
    }

    /// `argmin θ(x) + ‖x − u‖²/(2t)`, intersected with `set` when given.
    fn prox(&self, u: &DVector<f64>, t: f64, set: Option<&Bounds>) -> Result<DVector<f64>> {
        match self {
            ConvexTerm::Quadratic { q_mat, q_vec } => {
                if set.is_some() {
                    return Err(Error::UnsolvableSubproblem("quadratic term over a box".into()));
                }
                let n = u.len();
                let m = q_mat + DMatrix::identity(n, n) / t;
                let rhs = u / t - q_vec;
                m.cholesky()
                    .map(|c| c.solve(&rhs))
                    .ok_or_else(|| Error::UnsolvableSubproblem("prox system is singular".into()))
            }
            ConvexTerm::Penalty(p) => {
                let x = p.prox_select(u, t, u)?;
                // a separable convex prox composed with clipping is the prox over the box
                Ok(match set {
                    Some(b) => b.project(&x),
                    None => x,
                })
            }
        }
    }

    /// `dist(v, ∂θ(x) + N_set(x))`.
    fn subdiff_distance(&self, x: &DVector<f64>, v: &DVector<f64>, set: Option<&Bounds>) -> Result<f64> {
        match (self, set) {
            (ConvexTerm::Quadratic { q_mat, q_vec }, None) => Ok((v - (q_mat * x + q_vec)).norm()),
            (ConvexTerm::Penalty(p), None) => Ok(p.subdiff_distance(x, v)),
            (ConvexTerm::Penalty(p), Some(b)) => {
                let phi = p.scalar().ok_or(Error::NotSeparable)?;
                let mut acc = 0.0;
                for i in 0..x.len() {
                    let cone = box_normal(x[i], b.lower[i], b.upper[i]);
                    let d = phi.prox_subdiff(x[i]).sum(&cone).distance(v[i]);
                    acc += d * d;
                }
                Ok(acc.sqrt())
            }
            _ => Err(Error::UnsolvableSubproblem("quadratic term over a box".into())),
        }
    }
}

fn box_normal(t: f64, lo: f64, hi: f64) -> IntervalSet {
    let tol = 1e-12 * (1.0 + t.abs());
    let at_lo = (t - lo).abs() <= tol;
    let at_hi = (t - hi).abs() <= tol;
    match (at_lo, at_hi) {
        (true, true) => IntervalSet::real_line(),
        (true, false) => IntervalSet::closed(f64::NEG_INFINITY, 0.0),
        (false, true) => IntervalSet::closed(0.0, f64::INFINITY),
        _ => IntervalSet::point(0.0),
    }
}

/// `min θ₁(x) + θ₂(y)` over `x ∈ X`, `y ∈ Y` subject to `Ax + By = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearlyConstrainedProblem {
    pub theta1: ConvexTerm,
    pub theta2: ConvexTerm,
    pub a: DMatrix<f64>,
    pub b_mat: DMatrix<f64>,
    pub b: DVector<f64>,
    pub x_set: Option<Bounds>,
    pub y_set: Option<Bounds>,
}

impl LinearlyConstrainedProblem {
    pub fn new(theta1: ConvexTerm, theta2: ConvexTerm, a: DMatrix<f64>, b_mat: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let p = LinearlyConstrainedProblem { theta1, theta2, a, b_mat, b, x_set: None, y_set: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_sets(mut self, x_set: Option<Bounds>, y_set: Option<Bounds>) -> Result<Self> {
        self.x_set = x_set;
        self.y_set = y_set;
        self.validate()?;
        Ok(self)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.theta1.dim(), self.theta2.dim(), self.b.len())
    }

    pub fn validate(&self) -> Result<()> {
        self.theta1.validate()?;
        self.theta2.validate()?;
        let (n1, n2, m) = self.dims();
        check_dim(m, self.a.nrows())?;
        check_dim(n1, self.a.ncols())?;
        check_dim(m, self.b_mat.nrows())?;
        check_dim(n2, self.b_mat.ncols())?;
        if let Some(x) = &self.x_set {
            check_dim(n1, x.dim())?;
        }
        if let Some(y) = &self.y_set {
            check_dim(n2, y.dim())?;
        }
        Ok(())
    }

    pub fn objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.theta1.value(x) + self.theta2.value(y)
    }

    pub fn constraint_residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b_mat * y - &self.b
    }
}

/// Iterates, perturbations and inclusion checks of a splitting method.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KKTTrace {
    pub xs: Vec<DVector<f64>>,
    pub ys: Vec<DVector<f64>>,
    /// Multipliers; empty vectors for PDHG.
    pub lams: Vec<DVector<f64>>,
    /// `p^k = w^k − w^{k+1}` stacked as `(x, y, λ)`, one per step.
    pub perturbations: Vec<DVector<f64>>,
    /// `H p^k`, one per step.
    pub mapped: Vec<DVector<f64>>,
    /// `dist(H p^k, φ(w^{k+1}))`, one per step.
    pub inclusion_resid: Vec<f64>,
    pub inclusion_ok: Vec<bool>,
}

impl KKTTrace {
    fn start(x: DVector<f64>, y: DVector<f64>, lam: DVector<f64>) -> Self {
        KKTTrace { xs: vec![x], ys: vec![y], lams: vec![lam], ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn last(&self) -> (&DVector<f64>, &DVector<f64>, &DVector<f64>) {
        let k = self.xs.len() - 1;
        (&self.xs[k], &self.ys[k], &self.lams[k])
    }

    pub fn all_inclusions_hold(&self) -> bool {
        self.inclusion_ok.iter().all(|&b| b)
    }

    pub fn max_inclusion_resid(&self) -> f64 {
        self.inclusion_resid.iter().copied().fold(0.0, f64::max)
    }

    /// `‖(x, y, λ)^k − reference‖` per iterate.
    pub fn errors(&self, reference: (&DVector<f64>, &DVector<f64>, &DVector<f64>)) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let dx = (&self.xs[k] - reference.0).norm_squared();
                let dy = (&self.ys[k] - reference.1).norm_squared();
                let dl = (&self.lams[k] - reference.2).norm_squared();
                (dx + dy + dl).sqrt()
            })
            .collect()
    }

    /// CSV with columns `k,xnorm-err,ynorm-err,lamnorm-err,pnorm,inclusion_resid`.
    /// Errors are measured against `reference`, or the last iterate if absent.
    /// The step columns are empty at `k = 0`.
    pub fn to_csv(&self, reference: Option<(&DVector<f64>, &DVector<f64>, &DVector<f64>)>) -> String {
        let reference = reference.unwrap_or_else(|| self.last());
        let mut out = String::from("k,xnorm-err,ynorm-err,lamnorm-err,pnorm,inclusion_resid\n");
        for k in 0..self.len() {
            let _ = write!(
                out,
                "{k},{},{},{}",
                fmt_f64((&self.xs[k] - reference.0).norm()),
                fmt_f64((&self.ys[k] - reference.1).norm()),
                fmt_f64((&self.lams[k] - reference.2).norm()),
            );
            if k == 0 {
                out.push_str(",,\n");
            } else {
                let _ = writeln!(out, ",{},{}", fmt_f64(self.perturbations[k - 1].norm()), fmt_f64(self.inclusion_resid[k - 1]));
            }
        }
        out
    }
}

/// How a subproblem is solved.
#[derive(Debug, Clone)]
enum Step {
    /// `(Q + βMᵀM + D)` factor for a quadratic term.
    Linear(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    /// Prox with parameter `1/τ` when `βMᵀM + D = τI`.
    Prox(f64),
}

fn plan_step(term: &ConvexTerm, m: &DMatrix<f64>, d: &DMatrix<f64>, beta: f64, set: Option<&Bounds>, which: &str) -> Result<Step> {
    let coupling = beta * m.transpose() * m + d;
    match term {
        ConvexTerm::Quadratic { q_mat, .. } => {
            if set.is_some() {
                return Err(Error::UnsolvableSubproblem(format!("{which}-step: quadratic term over a box")));
            }
            (q_mat + &coupling)
                .cholesky()
                .map(Step::Linear)
                .ok_or_else(|| Error::UnsolvableSubproblem(format!("{which}-step system is not positive definite")))
        }
        ConvexTerm::Penalty(p) => {
            if set.is_some() && p.scalar().is_none() {
                return Err(Error::UnsolvableSubproblem(format!("{which}-step: box with a non-separable penalty")));
            }
            match linalg::scalar_multiple_of_identity(&coupling, 1e-10) {
                Some(tau) if tau > 0.0 => Ok(Step::Prox(tau)),
                _ => Err(Error::UnsolvableSubproblem(format!(
                    "{which}-step: beta*M^T M + D must be a positive multiple of the identity for a prox step"
                ))),
            }
        }
    }
}

/// Minimises `θ(z) + ½zᵀCz − vᵀz` over the set, where `C = βMᵀM + D`.
fn run_step(step: &Step, term: &ConvexTerm, v: &DVector<f64>, set: Option<&Bounds>) -> Result<DVector<f64>> {
    match (step, term) {
        (Step::Linear(chol), ConvexTerm::Quadratic { q_vec, .. }) => Ok(chol.solve(&(v - q_vec))),
        (Step::Prox(tau), t) => t.prox(&(v / *tau), 1.0 / tau, set),
        _ => unreachable!("step plan matches the term"),
    }
}

/// GPADMM with multiplier update `λ^{k+1} = λ^k − β(Ax^{k+1} + By^{k+1} − b)`.
pub fn gpadmm_solve(
    prob: &LinearlyConstrainedProblem,
    beta: f64,
    d1: &DMatrix<f64>,
    d2: &DMatrix<f64>,
    cfg: &SolverConfig,
    start: (&DVector<f64>, &DVector<f64>, &DVector<f64>),
) -> Result<KKTTrace> {
    prob.validate()?;
    let (n1, n2, m) = prob.dims();
    check_dim(n1, start.0.len())?;
    check_dim(n2, start.1.len())?;
    check_dim(m, start.2.len())?;
    if !(beta > 0.0) {
        return Err(Error::InvalidConfig("beta must be positive".into()));
    }
    for (d, n) in [(d1, n1), (d2, n2)] {
        if d.nrows() != n || d.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: d.nrows() });
        }
        if !linalg::is_psd(d) {
            return Err(Error::InvalidConfig("proximal weights must be symmetric PSD".into()));
        }
    }
    let (a, bm, b) = (&prob.a, &prob.b_mat, &prob.b);
    let x_step = plan_step(&prob.theta1, a, d1, beta, prob.x_set.as_ref(), "x")?;
    let y_step = plan_step(&prob.theta2, bm, d2, beta, prob.y_set.as_ref(), "y")?;
    let cross = beta * a.transpose() * bm;

    let (mut x, mut y, mut lam) = (start.0.clone(), start.1.clone(), start.2.clone());
    let mut trace = KKTTrace::start(x.clone(), y.clone(), lam.clone());
    for k in 0..cfg.max_iter {
        // ∇ of the smooth part is C z − v, so v collects the linear terms
        let c = bm * &y - b;
        let vx = a.transpose() * &lam - beta * a.transpose() * &c + d1 * &x;
        let x_new = run_step(&x_step, &prob.theta1, &vx, prob.x_set.as_ref())?;
        let c = a * &x_new - b;
        let vy = bm.transpose() * &lam - beta * bm.transpose() * &c + d2 * &y;
        let y_new = run_step(&y_step, &prob.theta2, &vy, prob.y_set.as_ref())?;
        let r = a * &x_new + bm * &y_new - b;
        let lam_new = &lam - beta * &r;
        if !(x_new.iter().chain(y_new.iter()).chain(lam_new.iter()).all(|v| v.is_finite())) {
            return Err(Error::NumericAbort { k: k + 1, detail: "non-finite iterate".into() });
        }

        let p1 = &x - &x_new;
        let p2 = &y - &y_new;
        let p3 = &lam - &lam_new;
        let h1 = d1 * &p1 - &cross * &p2;
        let h2 = d2 * &p2;
        let h3 = &p3 / beta;
        let res1 = prob.theta1.subdiff_distance(&x_new, &(&h1 + a.transpose() * &lam_new), prob.x_set.as_ref())?;
        let res2 = prob.theta2.subdiff_distance(&y_new, &(&h2 + bm.transpose() * &lam_new), prob.y_set.as_ref())?;
        let res3 = (&h3 - &r).norm();
        let resid = res1.max(res2).max(res3);
        let scale = 1.0 + x_new.amax().max(y_new.amax()).max(lam_new.amax());

        trace.perturbations.push(stack3(&p1, &p2, &p3));
        trace.mapped.push(stack3(&h1, &h2, &h3));
        trace.inclusion_resid.push(resid);
        trace.inclusion_ok.push(resid <= INCLUSION_TOL * scale);
        trace.xs.push(x_new.clone());
        trace.ys.push(y_new.clone());
        trace.lams.push(lam_new.clone());
        let pnorm = trace.perturbations.last().unwrap().norm();
        x = x_new;
        y = y_new;
        lam = lam_new;
        if pnorm <= cfg.stop_tol {
            break;
        }
    }
    Ok(trace)
}

fn stack3(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len() + c.len(), a.iter().chain(b.iter()).chain(c.iter()).copied())
}

/// `min_x max_y φ₁(x) + ⟨y, Kx⟩ − φ₂(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleProblem {
    pub phi1: ConvexTerm,
    pub phi2: ConvexTerm,
    pub k: DMatrix<f64>,
}

impl SaddleProblem {
    pub fn new(phi1: ConvexTerm, phi2: ConvexTerm, k: DMatrix<f64>) -> Result<Self> {
        let p = SaddleProblem { phi1, phi2, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.phi1.validate()?;
        self.phi2.validate()?;
        check_dim(self.phi1.dim(), self.k.ncols())?;
        check_dim(self.phi2.dim(), self.k.nrows())
    }

    /// `τσ‖K‖²` with `‖K‖` from power iteration.
    pub fn step_product(&self, tau: f64, sigma: f64) -> f64 {
        let kn = linalg::spectral_norm(&self.k);
        tau * sigma * kn * kn
    }
}

/// PDHG with extrapolation parameter 1:
/// `x⁺ = prox_{τφ₁}(x − τKᵀy)`, `y⁺ = prox_{σφ₂}(y + σK(2x⁺ − x))`.
pub fn pdhg_solve(
    prob: &SaddleProblem,
    tau: f64,
    sigma: f64,
    cfg: &SolverConfig,
    start: (&DVector<f64>, &DVector<f64>),
) -> Result<KKTTrace> {
    prob.validate()?;
    let k_mat = &prob.k;
    check_dim(k_mat.ncols(), start.0.len())?;
    check_dim(k_mat.nrows(), start.1.len())?;
    if !(tau > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidConfig("tau and sigma must be positive".into()));
    }
    let product = prob.step_product(tau, sigma);
    if cfg.theory_mode && product >= 1.0 {
        return Err(Error::StepCondition(product));
    }
    let (mut x, mut y) = (start.0.clone(), start.1.clone());
    let empty = DVector::zeros(0);
    let mut trace = KKTTrace::start(x.clone(), y.clone(), empty.clone());
    for k in 0..cfg.max_iter {
        let x_new = prob.phi1.prox(&(&x - tau * k_mat.transpose() * &y), tau, None)?;
        let bar = 2.0 * &x_new - &x;
        let y_new = prob.phi2.prox(&(&y + sigma * k_mat * &bar), sigma, None)?;
        if !(x_new.iter().chain(y_new.iter()).all(|v| v.is_finite())) {
            return Err(Error::NumericAbort { k: k + 1, detail: "non-finite iterate".into() });
        }
        let p1 = &x - &x_new;
        let p2 = &y - &y_new;
        let h1 = &p1 / tau - k_mat.transpose() * &p2;
        let h2 = &p2 / sigma - k_mat * &p1;
        let res1 = prob.phi1.subdiff_distance(&x_new, &(&h1 - k_mat.transpose() * &y_new), None)?;
        let res2 = prob.phi2.subdiff_distance(&y_new, &(&h2 + k_mat * &x_new), None)?;
        let resid = res1.max(res2);
        let scale = 1.0 + x_new.amax().max(y_new.amax());

        trace.perturbations.push(stack3(&p1, &p2, &empty));
        trace.mapped.push(stack3(&h1, &h2, &empty));
        trace.inclusion_resid.push(resid);
        trace.inclusion_ok.push(resid <= INCLUSION_TOL * scale);
        trace.xs.push(x_new.clone());
        trace.ys.push(y_new.clone());
        trace.lams.push(empty.clone());
        let pnorm = trace.perturbations.last().unwrap().norm();
        x = x_new;
        y = y_new;
        if pnorm <= cfg.stop_tol {
            break;
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn m1(a: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, a)
    }

    fn qp() -> LinearlyConstrainedProblem {
        let half_sq = || ConvexTerm::quadratic(m1(1.0), v(&[0.0]));
        LinearlyConstrainedProblem::new(half_sq(), half_sq(), m1(1.0), m1(1.0), v(&[1.0])).unwrap()
    }

    #[test]
    fn admm_solves_the_two_variable_qp() {
        let cfg = SolverConfig { max_iter: 500, stop_tol: 1e-14, ..Default::default() };
        let z = v(&[0.0]);
        let t = gpadmm_solve(&qp(), 1.0, &m1(0.0), &m1(0.0), &cfg, (&z, &z, &z)).unwrap();
        let (x, y, l) = t.last();
        assert!((x[0] - 0.5).abs() < 1e-10 && (y[0] - 0.5).abs() < 1e-10 && (l[0] - 0.5).abs() < 1e-10);
        assert!(t.all_inclusions_hold());
        assert!(t.mapped.iter().all(|h| h[1] == 0.0));
    }

    #[test]
    fn admm_fixed_point() {
        let cfg = SolverConfig { max_iter: 5, stop_tol: 0.0, ..Default::default() };
        let h = v(&[0.5]);
        let t = gpadmm_solve(&qp(), 1.0, &m1(0.0), &m1(0.0), &cfg, (&h, &h, &h)).unwrap();
        assert!(t.perturbations.iter().all(|p| p.amax() < 1e-15));
    }

    #[test]
    fn prox_step_requires_identity_coupling() {
        let prob = LinearlyConstrainedProblem::new(
            ConvexTerm::Penalty(Penalty::l1(2, 1.0)),
            ConvexTerm::quadratic(DMatrix::identity(2, 2), v(&[0.0, 0.0])),
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            -DMatrix::identity(2, 2),
            v(&[0.0, 0.0]),
        )
        .unwrap();
        let z = v(&[0.0, 0.0]);
        let zero = DMatrix::zeros(2, 2);
        let err = gpadmm_solve(&prob, 1.0, &zero, &zero, &SolverConfig::default(), (&z, &z, &z));
        assert!(matches!(err, Err(Error::UnsolvableSubproblem(_))));
    }

    #[test]
    fn pdhg_quadratic_saddle() {
        let sq = || ConvexTerm::quadratic(m1(1.0), v(&[0.0]));
        let prob = SaddleProblem::new(sq(), sq(), m1(1.0)).unwrap();
        let cfg = SolverConfig { max_iter: 2000, stop_tol: 1e-14, theory_mode: true, ..Default::default() };
        let t = pdhg_solve(&prob, 0.5, 0.5, &cfg, (&v(&[1.0]), &v(&[-2.0]))).unwrap();
        let (x, y, _) = t.last();
        assert!(x[0].abs() < 1e-10 && y[0].abs() < 1e-10);
        assert!(t.all_inclusions_hold());
    }

    #[test]
    fn pdhg_step_condition_in_theory_mode() {
        let sq = || ConvexTerm::quadratic(m1(1.0), v(&[0.0]));
        let prob = SaddleProblem::new(sq(), sq(), m1(2.0)).unwrap();
        let cfg = SolverConfig { theory_mode: true, ..Default::default() };
        assert!(matches!(pdhg_solve(&prob, 0.5, 1.0, &cfg, (&v(&[0.0]), &v(&[0.0]))), Err(Error::StepCondition(_))));
    }

    #[test]
    fn trace_csv_layout() {
        let cfg = SolverConfig { max_iter: 3, ..Default::default() };
        let z = v(&[0.0]);
        let t = gpadmm_solve(&qp(), 1.0, &m1(0.0), &m1(0.0), &cfg, (&z, &z, &z)).unwrap();
        let csv = t.to_csv(None);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,xnorm-err,ynorm-err,lamnorm-err,pnorm,inclusion_resid");
        assert!(lines[1].ends_with(",,"));
        assert_eq!(lines.len(), 5);
    }
}
