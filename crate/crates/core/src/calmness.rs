//! Point-based calmness certificates for separable problems (NNAMCQ, FOSCMS,
//! isolated calmness, polyhedrality) and empirical calmness moduli.
//!
//! The multiplier and critical-direction systems are products of planar cone
//! conditions. Each cone is split into convex atoms, every combination of atoms
//! becomes a homogeneous system `E v = 0, G v ≥ 0`, and a nonzero solution is
//! searched for exactly via null spaces and extreme-ray enumeration.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cones::{ConeAtom, ConeUnion2, PolylineGraph, P2};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::oracle::{self, SetValuedMap};
use crate::penalties::Penalty;
use crate::problem::{Bounds, ProblemSpec};

/// Coordinate limit of the exhaustive atom enumeration.
pub const MAX_CERTIFY_DIM: usize = 8;
/// Stationarity tolerance required before certifying.
pub const STATIONARY_TOL: f64 = 1e-8;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "NNAMCQ")]
    Nnamcq,
    #[serde(rename = "FOSCMS")]
    Foscms,
    #[serde(rename = "isolated-calmness")]
    IsolatedCalmness,
    #[serde(rename = "polyhedral")]
    Polyhedral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub condition: Condition,
    pub verdict: Verdict,
    /// Nonzero multipliers `(ξ, η)` solving the system, when any survive.
    pub witnesses: Vec<Vec<f64>>,
    /// Critical directions `w` examined.
    pub critical_directions: Vec<Vec<f64>>,
    pub pieces_examined: usize,
    pub notes: Vec<String>,
}

impl CertificateReport {
    fn new(condition: Condition, verdict: Verdict) -> Self {
        CertificateReport {
            condition,
            verdict,
            witnesses: Vec::new(),
            critical_directions: Vec::new(),
            pieces_examined: 0,
            notes: Vec::new(),
        }
    }

    /// Whether the report certifies calmness.
    pub fn certifies(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub kappa_hat: f64,
    pub samples: usize,
    pub max_ratio_point: Option<Vec<f64>>,
    pub max_ratio_perturbation: Option<Vec<f64>>,
    /// `(tag, ratio)` per sample; the tag is the iteration or sample index.
    pub ratios: Vec<(usize, f64)>,
}

impl ModulusEstimate {
    pub fn empty() -> Self {
        ModulusEstimate { kappa_hat: 0.0, samples: 0, max_ratio_point: None, max_ratio_perturbation: None, ratios: Vec::new() }
    }

    pub fn record(&mut self, tag: usize, ratio: f64, x: &DVector<f64>, p: &DVector<f64>) {
        self.samples += 1;
        self.ratios.push((tag, ratio));
        if ratio > self.kappa_hat || self.max_ratio_point.is_none() {
            self.kappa_hat = ratio;
            self.max_ratio_point = Some(x.iter().copied().collect());
            self.max_ratio_perturbation = Some(p.iter().copied().collect());
        }
    }

    fn merge(mut self, other: ModulusEstimate) -> Self {
        if other.samples > 0 && (self.samples == 0 || other.kappa_hat > self.kappa_hat) {
            self.kappa_hat = other.kappa_hat;
            self.max_ratio_point = other.max_ratio_point;
            self.max_ratio_perturbation = other.max_ratio_perturbation;
        }
        self.samples += other.samples;
        self.ratios.extend(other.ratios);
        self
    }
}

/// `0 ∈ ∇f(x) + ∂^πg(x)` checked coordinate- or block-wise within `tol`.
pub fn is_proximal_stationary(prob: &ProblemSpec, x: &DVector<f64>, tol: f64) -> bool {
    let Ok(grad) = prob.gradient(x) else { return false };
    match &prob.penalty {
        Penalty::Separable { phi, .. } => (0..prob.n).all(|i| phi.prox_subdiff(x[i]).distance(-grad[i]) <= tol),
        Penalty::GroupLasso { groups, weights, .. } => groups.iter().zip(weights).all(|(g, w)| {
            let sub = Penalty::GroupLasso { n: prob.n, groups: vec![g.clone()], weights: vec![*w] };
            let mut xs = DVector::zeros(prob.n);
            let mut vs = DVector::zeros(prob.n);
            for &i in g {
                xs[i] = x[i];
                vs[i] = -grad[i];
            }
            sub.subdiff_distance(&xs, &vs) <= tol
        }),
    }
}

/// Data shared by the separable certificates.
struct Setting {
    n: usize,
    graph: PolylineGraph,
    hess: DMatrix<f64>,
    points: Vec<P2>,
}

fn setting(prob: &ProblemSpec, x_bar: &DVector<f64>) -> Result<Setting> {
    check_dim(prob.n, x_bar.len())?;
    let n = prob.n;
    if n > MAX_CERTIFY_DIM {
        return Err(Error::TooManyCoordinates { n, limit: MAX_CERTIFY_DIM });
    }
    let graph = prob.penalty.graph()?;
    let hess = prob.loss.hessian(x_bar)?;
    let grad = prob.gradient(x_bar)?;
    if !is_proximal_stationary(prob, x_bar, STATIONARY_TOL) {
        let residual = prob.penalty.subdiff_distance(x_bar, &(-&grad));
        return Err(Error::NotStationary { residual });
    }
    let points: Vec<P2> = (0..n).map(|i| [x_bar[i], -grad[i]]).collect();
    if !graph.is_closed() {
        let closure = graph.closure();
        for p in &points {
            // closed near p iff the closure adds nothing in a neighbourhood
            let missing = closure.pieces().iter().zip(graph.pieces()).any(|(c, g)| {
                g.open_start && ((c.start[0] - p[0]).hypot(c.start[1] - p[1]) <= 1e-6)
            });
            if missing {
                return Err(Error::GraphNotClosed);
            }
        }
    }
    Ok(Setting { n, graph, hess, points })
}

/// Linear-map rows for the pair attached to coordinate `i`.
#[derive(Clone, Copy)]
enum PairMap {
    /// `(ξᵢ, ηᵢ) = ((Hη)ᵢ, ηᵢ)`.
    Multiplier,
    /// `(wᵢ, −(Hw)ᵢ)`.
    Direction,
}

fn pair_rows(h: &DMatrix<f64>, i: usize, map: PairMap) -> (DVector<f64>, DVector<f64>) {
    let n = h.nrows();
    let hi = DVector::from_fn(n, |j, _| h[(i, j)]);
    let ei = DVector::from_fn(n, |j, _| if j == i { 1.0 } else { 0.0 });
    match map {
        PairMap::Multiplier => (hi, ei),
        PairMap::Direction => (ei, -hi),
    }
}

/// Equality and inequality rows expressing `(a, b) ∈ atom` where `a = rᵃ·v`, `b = rᵇ·v`.
fn atom_rows(atom: &ConeAtom, ra: &DVector<f64>, rb: &DVector<f64>, eq: &mut Vec<DVector<f64>>, ineq: &mut Vec<DVector<f64>>) {
    let lin = |c: P2| ra * c[0] + rb * c[1];
    match *atom {
        ConeAtom::ZeroOnly => {
            eq.push(ra.clone());
            eq.push(rb.clone());
        }
        ConeAtom::Ray { generator: g } => {
            eq.push(lin([-g[1], g[0]]));
            ineq.push(lin(g));
        }
        ConeAtom::Line { generator: g } => eq.push(lin([-g[1], g[0]])),
        ConeAtom::Sector { g1, g2 } => {
            ineq.push(lin([-g1[1], g1[0]]));
            ineq.push(lin([g2[1], -g2[0]]));
        }
        ConeAtom::HalfPlane { normal } => ineq.push(lin(normal)),
        ConeAtom::FullPlane => {}
    }
}

fn stack(rows: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

/// Generators of `{v : E v = 0, G v ≥ 0}`: lineality basis (both signs),
/// extreme rays and one interior direction. Empty when only `v = 0` solves.
pub fn cone_generators(eq: &DMatrix<f64>, ineq: &DMatrix<f64>, n: usize) -> Vec<DVector<f64>> {
    let basis = linalg::null_space(eq, n);
    let r = basis.ncols();
    if r == 0 {
        return Vec::new();
    }
    let c = ineq * &basis;
    let scale = 1.0 + c.amax();
    let lineality = linalg::null_space(&c, r);
    let mut gens: Vec<DVector<f64>> = Vec::new();
    for k in 0..lineality.ncols() {
        let z = lineality.column(k).into_owned();
        gens.push(&basis * &z);
        gens.push(-(&basis * &z));
    }
    // pointed part lives in the orthogonal complement of the lineality space
    let complement = if lineality.ncols() == 0 {
        DMatrix::identity(r, r)
    } else {
        linalg::null_space(&lineality.transpose(), r)
    };
    let d = complement.ncols();
    let mut rays: Vec<DVector<f64>> = Vec::new();
    if d > 0 {
        let cp = &c * &complement;
        let m = cp.nrows();
        let feasible = |y: &DVector<f64>| (&cp * y).iter().all(|&s| s >= -FEAS_TOL * scale);
        let mut consider = |y: DVector<f64>| {
            for cand in [y.clone(), -y] {
                if cand.norm() > 0.0 && feasible(&cand) {
                    let v = &basis * (&complement * &cand);
                    let v = &v / v.norm();
                    if !rays.iter().any(|u| (u - &v).norm() <= 1e-9) {
                        rays.push(v);
                    }
                }
            }
        };
        if d == 1 {
            consider(DVector::from_element(1, 1.0));
        } else if m + 1 >= d {
            for subset in combinations(m, d - 1) {
                let rows = DMatrix::from_fn(d - 1, d, |a, b| cp[(subset[a], b)]);
                let ns = linalg::null_space(&rows, d);
                if ns.ncols() == 1 {
                    consider(ns.column(0).into_owned());
                }
            }
        }
    }
    if !rays.is_empty() {
        let interior: DVector<f64> = rays.iter().fold(DVector::zeros(n), |acc, r| acc + r);
        let norm = interior.norm();
        gens.extend(rays);
        if norm > 1e-9 {
            let v = interior / norm;
            if !gens.iter().any(|u| (u - &v).norm() <= 1e-9) {
                gens.push(v);
            }
        }
    }
    for g in gens.iter_mut() {
        let nrm = g.norm();
        if nrm > 0.0 {
            *g /= nrm;
        }
    }
    gens
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Searches every atom combination of the per-coordinate cones for a
/// nonzero `v`. Returns the number of combinations and the generators found.
fn solve_system(h: &DMatrix<f64>, cones: &[ConeUnion2], map: PairMap) -> (usize, Vec<DVector<f64>>) {
    let n = h.nrows();
    let atoms: Vec<Vec<ConeAtom>> = cones.iter().map(|c| c.atoms()).collect();
    let total: usize = atoms.iter().map(|a| a.len()).product();
    let mut found = Vec::new();
    for code in 0..total {
        let mut eq = Vec::new();
        let mut ineq = Vec::new();
        let mut rest = code;
        for i in 0..n {
            let atom = &atoms[i][rest % atoms[i].len()];
            rest /= atoms[i].len();
            let (ra, rb) = pair_rows(h, i, map);
            atom_rows(atom, &ra, &rb, &mut eq, &mut ineq);
        }
        let gens = cone_generators(&stack(&eq, n), &stack(&ineq, n), n);
        for g in gens {
            if !found.iter().any(|u: &DVector<f64>| (u - &g).norm() <= 1e-9) {
                found.push(g);
            }
        }
    }
    (total, found)
}

fn multiplier_witness(h: &DMatrix<f64>, eta: &DVector<f64>) -> Vec<f64> {
    let xi = h * eta;
    xi.iter().chain(eta.iter()).copied().collect()
}

/// NNAMCQ: only `(ξ, η) = 0` solves `ξᵢ = (∇²f(x̄)η)ᵢ`, `(ξᵢ, ηᵢ) ∈ N_{gph ∂^πφ}(x̄ᵢ, −∂ᵢf(x̄))`.
pub fn check_nnamcq(prob: &ProblemSpec, x_bar: &DVector<f64>) -> Result<CertificateReport> {
    let s = setting(prob, x_bar)?;
    let cones: Vec<ConeUnion2> = s.points.iter().map(|p| s.graph.limiting_normal_cone(*p)).collect::<Result<_>>()?;
    let (examined, gens) = solve_system(&s.hess, &cones, PairMap::Multiplier);
    let mut report = CertificateReport::new(Condition::Nnamcq, if gens.is_empty() { Verdict::Holds } else { Verdict::Fails });
    report.pieces_examined = examined;
    report.witnesses = gens.iter().map(|eta| multiplier_witness(&s.hess, eta)).collect();
    Ok(report)
}

/// FOSCMS. Stage 1 collects linearised critical directions; with none the
/// map is isolated calm. Stage 2 solves the multiplier system over
/// directional normal cones along each direction generator.
pub fn check_foscms(prob: &ProblemSpec, x_bar: &DVector<f64>) -> Result<CertificateReport> {
    let s = setting(prob, x_bar)?;
    let tangents: Vec<ConeUnion2> = s.points.iter().map(|p| s.graph.tangent_cone(*p)).collect::<Result<_>>()?;
    let (examined1, directions) = solve_system(&s.hess, &tangents, PairMap::Direction);
    if directions.is_empty() {
        let mut report = CertificateReport::new(Condition::IsolatedCalmness, Verdict::Holds);
        report.pieces_examined = examined1;
        report.notes.push("no nonzero linearized critical direction".into());
        return Ok(report);
    }
    let mut report = CertificateReport::new(Condition::Foscms, Verdict::Holds);
    report.pieces_examined = examined1;
    let hnorm = 1.0 + s.hess.amax();
    for w in &directions {
        let hw = &s.hess * w;
        let cones: Vec<ConeUnion2> = (0..s.n)
            .map(|i| {
                let mut d = [w[i], -hw[i]];
                if d[0].hypot(d[1]) <= 1e-12 * hnorm {
                    d = [0.0, 0.0];
                }
                s.graph.directional_normal_cone(s.points[i], d)
            })
            .collect::<Result<_>>()?;
        let (examined2, gens) = solve_system(&s.hess, &cones, PairMap::Multiplier);
        report.pieces_examined += examined2;
        report.critical_directions.push(w.iter().copied().collect());
        for eta in gens {
            report.verdict = Verdict::Inconclusive;
            report.witnesses.push(multiplier_witness(&s.hess, &eta));
        }
    }
    if report.verdict == Verdict::Inconclusive {
        report.notes.push("a nonzero multiplier survives along a critical direction".into());
    }
    Ok(report)
}

/// Piecewise-affine gradient together with a polyhedral subdifferential graph.
pub fn check_polyhedral(prob: &ProblemSpec) -> CertificateReport {
    let affine = prob.loss.has_affine_gradient();
    let polyhedral = prob.penalty.scalar().is_some();
    let mut report = CertificateReport::new(Condition::Polyhedral, if affine && polyhedral { Verdict::Holds } else { Verdict::Fails });
    if !affine {
        report.notes.push(format!("{} loss gradient is not piecewise affine", prob.loss.family().name()));
    }
    if !polyhedral {
        report.notes.push("penalty subdifferential graph is not polyhedral".into());
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PerturbedMapKind {
    #[serde(rename = "S_cano")]
    SCano,
    #[serde(rename = "S_PG")]
    SPg,
}

/// Empirical calmness modulus: `max dist(x, 𝒳^π)/‖p‖` over `p` on a grid of
/// `[−radius, radius]ⁿ` and all `x ∈ S(p)` near `x̄`, found by the oracle.
pub fn estimate_calmness_modulus(
    prob: &ProblemSpec,
    x_bar: &DVector<f64>,
    map: PerturbedMapKind,
    gamma: f64,
    radius: f64,
    grid: usize,
) -> Result<ModulusEstimate> {
    check_dim(prob.n, x_bar.len())?;
    let n = prob.n;
    if n > 2 {
        return Err(Error::TooManyCoordinates { n, limit: 2 });
    }
    if grid < 2 || !(radius > 0.0) {
        return Err(Error::InvalidConfig("need grid >= 2 and radius > 0".into()));
    }
    let local = Bounds::around(x_bar, 10.0 * radius);
    let stationary = oracle::brute_force_stationary_set(prob, &Bounds::around(x_bar, 20.0 * radius), oracle::STATIONARY_CELLS)?;
    if stationary.is_empty() {
        return Err(Error::OracleNoSolution);
    }
    let oracle_map = match map {
        PerturbedMapKind::SCano => SetValuedMap::SCano,
        PerturbedMapKind::SPg => SetValuedMap::SPg { gamma },
    };
    let axis: Vec<f64> = (0..grid).map(|j| -radius + 2.0 * radius * j as f64 / (grid - 1) as f64).collect();
    let count = grid.pow(n as u32);
    let perturbation = |idx: usize| DVector::from_fn(n, |i, _| axis[(idx / grid.pow(i as u32)) % grid]);
    let eval = |idx: usize| -> Result<ModulusEstimate> {
        let p = perturbation(idx);
        let mut est = ModulusEstimate::empty();
        let pn = p.norm();
        if pn == 0.0 {
            return Ok(est);
        }
        let sol = oracle::brute_force_set_valued_solve(prob, oracle_map, &p, &local, oracle::STATIONARY_CELLS)?;
        for x in &sol.points {
            est.record(idx, stationary.distance(x)? / pn, x, &p);
        }
        Ok(est)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<ModulusEstimate> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(eval).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<ModulusEstimate> = (0..count).map(eval).collect::<Result<_>>()?;
    let est = parts.into_iter().fold(ModulusEstimate::empty(), ModulusEstimate::merge);
    if est.samples == 0 {
        return Err(Error::OracleNoSolution);
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::SmoothLoss;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn shifted(center: &[f64], penalty: Penalty) -> ProblemSpec {
        let n = center.len();
        ProblemSpec::new(SmoothLoss::quadratic(DMatrix::identity(n, n), -v(center)), penalty).unwrap()
    }

    #[test]
    fn proximal_stationarity_examples() {
        let prob = shifted(&[4.0, 0.0], Penalty::l1(2, 1.0));
        assert!(is_proximal_stationary(&prob, &v(&[3.0, 0.0]), 1e-12));
        assert!(!is_proximal_stationary(&prob, &v(&[4.0, 0.0]), 1e-12));
        let neg = shifted(&[0.0], Penalty::negabs(1, 1.0));
        assert!(!is_proximal_stationary(&neg, &v(&[0.0]), 1e-12));
    }

    #[test]
    fn nnamcq_for_l1_at_the_origin() {
        let prob = shifted(&[0.0], Penalty::l1(1, 1.0));
        let r = check_nnamcq(&prob, &v(&[0.0])).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.pieces_examined >= 1);
    }

    #[test]
    fn nnamcq_fails_on_a_flat_direction() {
        // f = ½x₁², g = 0 in 2-D: η = (0, 1) survives ξ = Hη = 0
        let loss = SmoothLoss::quadratic(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), v(&[0.0, 0.0]));
        let prob = ProblemSpec::new(loss, Penalty::zero(2)).unwrap();
        let r = check_nnamcq(&prob, &v(&[0.0, 0.0])).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let w = &r.witnesses[0];
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12 && (w[3].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_stationary_points_are_rejected() {
        let prob = shifted(&[4.0, 0.0], Penalty::l1(2, 1.0));
        assert!(matches!(check_nnamcq(&prob, &v(&[4.0, 0.0])), Err(Error::NotStationary { .. })));
    }

    #[test]
    fn polyhedral_family_check() {
        assert_eq!(check_polyhedral(&shifted(&[1.0], Penalty::l1(1, 1.0))).verdict, Verdict::Holds);
        let g = Penalty::group_lasso(vec![vec![0]], vec![1.0]).unwrap();
        assert_eq!(check_polyhedral(&shifted(&[1.0], g)).verdict, Verdict::Fails);
        let logistic = SmoothLoss::logistic(DMatrix::identity(1, 1), v(&[1.0]));
        let prob = ProblemSpec::new(logistic, Penalty::scad(1, 1.0, 3.0)).unwrap();
        assert_eq!(check_polyhedral(&prob).verdict, Verdict::Fails);
    }

    #[test]
    fn generators_of_simple_cones() {
        // {v ∈ ℝ² : v₁ ≥ 0, v₂ ≥ 0}
        let eq = DMatrix::zeros(0, 2);
        let ineq = DMatrix::identity(2, 2);
        let g = cone_generators(&eq, &ineq, 2);
        assert_eq!(g.len(), 3);
        // {v : v₁ ≥ 0, −v₁ ≥ 0, v₂ = 0} is {0}
        let eq = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let ineq = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]);
        assert!(cone_generators(&eq, &ineq, 2).is_empty());
    }

    #[test]
    fn calmness_modulus_of_identity() {
        let prob = shifted(&[1.0], Penalty::zero(1));
        let est = estimate_calmness_modulus(&prob, &v(&[1.0]), PerturbedMapKind::SCano, 0.5, 0.1, 11).unwrap();
        assert!((est.kappa_hat - 1.0).abs() < 1e-8);
    }
}
