//! Checks of the descent / cost-to-go inequalities along traces, error-bound
//! and rate estimation, the KL exponent-½ test and stationarity classification.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calmness::ModulusEstimate;
use crate::error::{check_dim, Error, Result};
use crate::penalties::Penalty;
use crate::problem::ProblemSpec;
use crate::stationary::{distance_to_set, StationarySetApprox};
use crate::trace::IterateTrace;

/// Relative tolerance for the inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Fewest points accepted by a rate fit.
pub const MIN_FIT_POINTS: usize = 10;

/// Sufficient-descent constant `κ₁ = 1/(2γ) − L/2`.
pub fn kappa1(gamma: f64, l: f64) -> f64 {
    1.0 / (2.0 * gamma) - l / 2.0
}

/// Cost-to-go constant `κ₂ = max{1/γ + (L+1)/2, L/2 + 1/(2γ)}`.
pub fn kappa2(gamma: f64, l: f64) -> f64 {
    (1.0 / gamma + (l + 1.0) / 2.0).max(l / 2.0 + 1.0 / (2.0 * gamma))
}

/// The linear rate `σ = 1/(1 + κ₁/(κ₂(κ² + 1)))` guaranteed by the error bound with modulus `κ`.
pub fn predicted_sigma(kappa1: f64, kappa2: f64, kappa: f64) -> f64 {
    1.0 / (1.0 + kappa1 / (kappa2 * (kappa * kappa + 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Index of the probe point, for cost-to-go checks.
    pub probe: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub constant: f64,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl InequalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `F(x^{k+1}) − F(x^k) ≤ −κ₁‖x^{k+1} − x^k‖²` at every step.
pub fn verify_sufficient_descent(trace: &IterateTrace, gamma: f64, l: f64) -> InequalityReport {
    let k1 = kappa1(gamma, l);
    let mut violations = Vec::new();
    for k in 0..trace.iterations() {
        let p2 = trace.perturbations[k + 1].as_ref().unwrap().norm_squared();
        let lhs = trace.objectives[k + 1] - trace.objectives[k];
        let rhs = -k1 * p2;
        if lhs > rhs + INEQUALITY_TOL * (1.0 + trace.objectives[k].abs()) {
            violations.push(Violation { k, lhs, rhs, probe: None });
        }
    }
    InequalityReport { constant: k1, checks: trace.iterations(), violations }
}

/// `F(x^{k+1}) − F(x) ≤ κ₂(‖x − x^{k+1}‖² + ‖x^{k+1} − x^k‖²)` for every step and probe `x`.
pub fn verify_cost_to_go(
    trace: &IterateTrace,
    prob: &ProblemSpec,
    gamma: f64,
    l: f64,
    probes: &[DVector<f64>],
) -> Result<InequalityReport> {
    let k2 = kappa2(gamma, l);
    let probe_values: Vec<f64> = probes.iter().map(|x| prob.objective(x)).collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut checks = 0;
    for k in 0..trace.iterations() {
        let next = &trace.points[k + 1];
        let p2 = trace.perturbations[k + 1].as_ref().unwrap().norm_squared();
        for (j, x) in probes.iter().enumerate() {
            checks += 1;
            let lhs = trace.objectives[k + 1] - probe_values[j];
            let rhs = k2 * ((x - next).norm_squared() + p2);
            if lhs > rhs + INEQUALITY_TOL * (1.0 + trace.objectives[k + 1].abs()) {
                violations.push(Violation { k, lhs, rhs, probe: Some(j) });
            }
        }
    }
    Ok(InequalityReport { constant: k2, checks, violations })
}

/// Proximal residual `dist(x, Prox_g^γ(x − γ∇f(x)))` over the exact prox set.
pub fn residual(prob: &ProblemSpec, x: &DVector<f64>, gamma: f64) -> Result<f64> {
    check_dim(prob.n, x.len())?;
    let u = x - gamma * prob.gradient(x)?;
    match &prob.penalty {
        Penalty::Separable { .. } => {
            let coords = prob.penalty.prox_coordinates(&u, gamma)?;
            Ok(coords
                .iter()
                .enumerate()
                .map(|(i, (set, _))| set.iter().map(|t| (t - x[i]).abs()).fold(f64::INFINITY, f64::min).powi(2))
                .sum::<f64>()
                .sqrt())
        }
        Penalty::GroupLasso { .. } => {
            let r = prob.penalty.prox(&u, gamma)?;
            Ok(r.minimizers.iter().map(|m| (m - x).norm()).fold(f64::INFINITY, f64::min))
        }
    }
}

/// Empirical error-bound modulus along a trace:
/// `κ̂ = max dist(x^{k+1}, S)/‖x^{k+1} − x^k‖` over iterates within `window`
/// of the stationary point nearest to the final iterate.
pub fn estimate_error_bound_constant(trace: &IterateTrace, set: &StationarySetApprox, window: f64) -> Result<ModulusEstimate> {
    let center = set
        .points
        .iter()
        .min_by(|a, b| (*a - trace.last()).norm().total_cmp(&(*b - trace.last()).norm()))
        .ok_or(Error::EmptyStationarySet)?;
    let mut est = ModulusEstimate::empty();
    for k in 0..trace.iterations() {
        let x = &trace.points[k + 1];
        let p = trace.perturbations[k + 1].as_ref().unwrap();
        let pn = p.norm();
        if (x - center).norm() > window || pn < 1e2 * f64::EPSILON * (1.0 + trace.points[k].norm()) {
            continue;
        }
        let ratio = distance_to_set(x, set)? / pn;
        est.record(k + 1, ratio, x, p);
    }
    if est.samples == 0 {
        return Err(Error::NoInformativeSteps);
    }
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// Fitted geometric factor of `F(x^k) − F*`.
    pub sigma_hat: f64,
    /// Fitted geometric factor of the distance sequence.
    pub rho_hat: f64,
    pub burn_in: usize,
    pub r_squared: f64,
    pub rho_r_squared: f64,
    pub points_used: usize,
}

impl RateFit {
    /// `σ̂ ≤ σ + 0.05`.
    pub fn consistent_with(&self, predicted: f64) -> bool {
        self.sigma_hat <= predicted + 0.05
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFitOptions {
    /// Fraction of the usable prefix discarded as burn-in.
    pub burn_in_frac: f64,
    /// Fit only the last this-many usable points.
    pub last: Option<usize>,
}

impl Default for RateFitOptions {
    fn default() -> Self {
        RateFitOptions { burn_in_frac: 0.2, last: None }
    }
}

/// Least-squares fit of `log v_k` against `k`; returns (slope, intercept, r²).
fn log_linear_fit(ks: &[f64], vs: &[f64]) -> (f64, f64, f64) {
    let n = ks.len() as f64;
    let ys: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    let mk = ks.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ks.iter().map(|k| (k - mk).powi(2)).sum();
    let sxy: f64 = ks.iter().zip(&ys).map(|(k, y)| (k - mk) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mk, r2)
}

/// Usable window of a sequence: the contiguous prefix above `floor`, minus
/// burn-in, optionally trimmed to its last points.
fn usable_window(values: &[f64], floor: f64, opts: &RateFitOptions) -> (usize, usize, usize) {
    let end = values.iter().position(|v| !(*v > floor)).unwrap_or(values.len());
    let burn = ((end as f64) * opts.burn_in_frac).floor() as usize;
    let start = match opts.last {
        Some(m) => end.saturating_sub(m).max(burn),
        None => burn,
    };
    (start, end, burn)
}

fn geometric_factor(values: &[f64], floor: f64, opts: &RateFitOptions) -> Result<(f64, f64, usize, usize)> {
    let (start, end, burn) = usable_window(values, floor, opts);
    let used = end.saturating_sub(start);
    if used < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { got: used, need: MIN_FIT_POINTS });
    }
    let ks: Vec<f64> = (start..end).map(|k| k as f64).collect();
    let (slope, _, r2) = log_linear_fit(&ks, &values[start..end]);
    Ok((slope.exp(), r2, burn, used))
}

/// Linear-rate fit of `F(x^k) − F*` and `‖x^k − x̄‖`.
pub fn fit_linear_rate(trace: &IterateTrace, f_star: f64, x_bar: &DVector<f64>) -> Result<RateFit> {
    fit_linear_rate_with(trace, f_star, |x| (x - x_bar).norm(), &RateFitOptions::default())
}

/// As [`fit_linear_rate`] with an arbitrary distance (e.g. to a solution set).
pub fn fit_linear_rate_with(
    trace: &IterateTrace,
    f_star: f64,
    dist: impl Fn(&DVector<f64>) -> f64,
    opts: &RateFitOptions,
) -> Result<RateFit> {
    let gaps: Vec<f64> = trace.objectives.iter().map(|f| f - f_star).collect();
    let floor = 1e3 * f64::EPSILON * (1.0 + f_star.abs());
    let (sigma_hat, r_squared, burn_in, points_used) = geometric_factor(&gaps, floor, opts)?;
    let dists: Vec<f64> = trace.points.iter().map(dist).collect();
    let scale = trace.points.iter().map(|x| x.amax()).fold(0.0, f64::max);
    let dfloor = 1e3 * f64::EPSILON * (1.0 + scale);
    let (rho_hat, rho_r_squared, _, _) = geometric_factor(&dists, dfloor, opts)?;
    Ok(RateFit { sigma_hat, rho_hat, burn_in, r_squared, rho_r_squared, points_used })
}

/// A function whose value and distance `dist(0, ∂F(x))` can be evaluated.
pub trait KlObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    /// `dist(0, ∂F(x))` with the limiting subdifferential.
    fn subdiff_distance(&self, x: &DVector<f64>) -> f64;
    /// Coordinates at which `F` has a kink at `x̄`; samples snap them to `x̄`.
    fn kink_coordinates(&self, _x_bar: &DVector<f64>) -> Vec<usize> {
        Vec::new()
    }
}

impl KlObjective for ProblemSpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.objective(x).unwrap_or(f64::INFINITY)
    }

    fn subdiff_distance(&self, x: &DVector<f64>) -> f64 {
        match self.gradient(x) {
            Ok(g) => self.penalty.limiting_subdiff_distance(x, &(-g)),
            Err(_) => f64::INFINITY,
        }
    }

    fn kink_coordinates(&self, x_bar: &DVector<f64>) -> Vec<usize> {
        match &self.penalty {
            Penalty::Separable { phi, .. } => (0..self.n)
                .filter(|&i| {
                    let s = phi.limiting_subdiff(x_bar[i]);
                    s.intervals().len() != 1 || s.intervals()[0].0 != s.intervals()[0].1
                })
                .collect(),
            Penalty::GroupLasso { groups, .. } => groups
                .iter()
                .filter(|g| g.iter().all(|&i| x_bar[i] == 0.0))
                .flatten()
                .copied()
                .collect(),
        }
    }
}

/// `F(x) = Σ|xᵢ|^e`, a smooth control with KL exponent `1 − 1/e` at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerObjective {
    pub n: usize,
    pub exponent: f64,
}

impl KlObjective for PowerObjective {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|v| v.abs().powf(self.exponent)).sum()
    }

    fn subdiff_distance(&self, x: &DVector<f64>) -> f64 {
        x.iter()
            .map(|v| (self.exponent * v.abs().powf(self.exponent - 1.0)).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlReport {
    /// Smallest `κ` with `κ(F(x) − F(x̄))^{−1/2} dist(0, ∂F(x)) ≥ 1` on every sample.
    pub kappa_min: f64,
    pub kappa: f64,
    /// Fraction of samples violating the inequality at `kappa`.
    pub violation_fraction: f64,
    pub samples_used: usize,
    pub epsilon: f64,
    pub worst_point: Option<Vec<f64>>,
}

impl KlReport {
    pub fn holds(&self) -> bool {
        self.violation_fraction == 0.0
    }
}

/// Samples `x ∈ B(x̄, ε)` with `F(x̄) < F(x) < ∞` on a deterministic radius
/// grid `ε·j/N` with seeded random directions, and evaluates the KL
/// inequality with exponent ½.
pub fn check_kl_half(obj: &dyn KlObjective, x_bar: &DVector<f64>, kappa: f64, eps: f64, samples: usize, seed: u64) -> Result<KlReport> {
    let n = obj.dim();
    check_dim(n, x_bar.len())?;
    let f_bar = obj.value(x_bar);
    let kinks = obj.kink_coordinates(x_bar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kappa_min: f64 = 0.0;
    let mut worst = None;
    let mut used = 0;
    let mut ratios = Vec::with_capacity(samples);
    for j in 1..=samples {
        let r = eps * j as f64 / samples as f64;
        let mut d = DVector::from_fn(n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        if !kinks.is_empty() && kinks.len() < n && rng.gen_bool(0.5) {
            for &i in &kinks {
                d[i] = 0.0;
            }
        }
        let dn = d.norm();
        if dn == 0.0 {
            continue;
        }
        let x = x_bar + d * (r / dn);
        let f = obj.value(&x);
        if !(f > f_bar && f.is_finite()) {
            continue;
        }
        used += 1;
        let dist = obj.subdiff_distance(&x);
        let ratio = (f - f_bar).sqrt() / dist;
        ratios.push(ratio);
        if ratio > kappa_min {
            kappa_min = ratio;
            worst = Some(x.iter().copied().collect());
        }
    }
    let violations = ratios.iter().filter(|&&q| kappa < q).count();
    Ok(KlReport {
        kappa_min,
        kappa,
        violation_fraction: if used == 0 { 0.0 } else { violations as f64 / used as f64 },
        samples_used: used,
        epsilon: eps,
        worst_point: worst,
    })
}

/// Whether every stationary point within `eps` of `x̄` shares the value `F(x̄)`.
pub fn check_proper_separation(set: &StationarySetApprox, prob: &ProblemSpec, x_bar: &DVector<f64>, eps: f64) -> Result<bool> {
    let f_bar = prob.objective(x_bar)?;
    for p in &set.points {
        if (p - x_bar).norm() <= eps && (prob.objective(p)? - f_bar).abs() > 1e-8 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stationarity {
    Proximal,
    LimitingOnly,
    None,
}

/// Proximal if `−∇f(x) ∈ ∂^πg(x)`, limiting-only if it lies only in `∂g(x)`.
pub fn classify_stationarity(prob: &ProblemSpec, x: &DVector<f64>, tol: f64) -> Result<Stationarity> {
    let minus_grad = -prob.gradient(x)?;
    if prob.penalty.subdiff_distance(x, &minus_grad) <= tol {
        Ok(Stationarity::Proximal)
    } else if prob.penalty.limiting_subdiff_distance(x, &minus_grad) <= tol {
        Ok(Stationarity::LimitingOnly)
    } else {
        Ok(Stationarity::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::SmoothLoss;
    use crate::penalties::Penalty;
    use crate::problem::SolverConfig;
    use crate::solvers::pg_solve;
    use crate::stationary::StationarySetApprox;
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn shifted(center: &[f64], penalty: Penalty) -> ProblemSpec {
        let n = center.len();
        ProblemSpec::new(SmoothLoss::quadratic(DMatrix::identity(n, n), -v(center)), penalty).unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(kappa1(0.25, 2.0), 1.0);
        assert_eq!(kappa2(0.25, 2.0), 5.5);
        assert!((predicted_sigma(1.0, 5.5, 1.0) - 11.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_trace_passes_vacuously() {
        let mut t = IterateTrace::new(v(&[1.0]), 2.0);
        t.push(v(&[1.0]), 2.0);
        assert!(verify_sufficient_descent(&t, 0.5, 1.0).holds());
    }

    #[test]
    fn residual_examples() {
        let prob = shifted(&[4.0], Penalty::l1(1, 1.0));
        assert_eq!(residual(&prob, &v(&[0.0]), 0.5).unwrap(), 1.5);
        assert_eq!(residual(&prob, &v(&[3.0]), 0.5).unwrap(), 0.0);
        // prox of −|·| at 0 is {±γλ}
        let neg = shifted(&[0.0], Penalty::negabs(1, 1.0));
        assert_eq!(residual(&neg, &v(&[0.0]), 0.5).unwrap(), 0.5);
    }

    #[test]
    fn geometric_sequence_fit() {
        let mut t = IterateTrace::new(v(&[1.0]), 1.0);
        for k in 1..40 {
            let s = 0.5f64.powi(k);
            t.push(v(&[s]), s);
        }
        let fit = fit_linear_rate(&t, 0.0, &v(&[0.0])).unwrap();
        assert!((fit.sigma_hat - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.rho_hat - 0.5).abs() < 1e-12);
        let short = IterateTrace::new(v(&[1.0]), 1.0);
        assert!(matches!(fit_linear_rate(&short, 0.0, &v(&[0.0])), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn error_bound_on_gradient_descent() {
        // x^{k+1} = (1 − γ)x^k + 4γ, dist/‖p‖ = (1 − γ)/γ exactly
        let prob = shifted(&[4.0], Penalty::zero(1));
        let cfg = SolverConfig { gamma: 0.5, max_iter: 40, ..Default::default() };
        let t = pg_solve(&prob, &cfg, &v(&[0.0])).unwrap();
        let set = StationarySetApprox::analytic(vec![v(&[4.0])]);
        let est = estimate_error_bound_constant(&t, &set, 10.0).unwrap();
        assert!((est.kappa_hat - 1.0).abs() < 1e-9);
        let mut fixed = IterateTrace::new(v(&[4.0]), 0.0);
        fixed.push(v(&[4.0]), 0.0);
        assert_eq!(estimate_error_bound_constant(&fixed, &set, 1.0).unwrap_err(), Error::NoInformativeSteps);
    }

    #[test]
    fn kl_half_for_a_quadratic() {
        let f = PowerObjective { n: 1, exponent: 2.0 };
        // √(x²)/|2x| = 1/2 on every sample
        let r = check_kl_half(&f, &v(&[0.0]), 0.6, 0.1, 100, 3).unwrap();
        assert!((r.kappa_min - 0.5).abs() < 1e-12);
        assert!(r.holds());
        let quart = PowerObjective { n: 1, exponent: 4.0 };
        let a = check_kl_half(&quart, &v(&[0.0]), 1.0, 1e-1, 100, 3).unwrap();
        let b = check_kl_half(&quart, &v(&[0.0]), 1.0, 1e-2, 100, 3).unwrap();
        assert!((b.kappa_min / a.kappa_min - 10.0).abs() < 1e-9);
    }

    #[test]
    fn stationarity_classes() {
        // f = ½(x − 1)², f'(0) = −1
        let neg = shifted(&[1.0], Penalty::negabs(1, 1.0));
        assert_eq!(classify_stationarity(&neg, &v(&[0.0]), 1e-12).unwrap(), Stationarity::LimitingOnly);
        assert_eq!(classify_stationarity(&neg, &v(&[2.0]), 1e-12).unwrap(), Stationarity::Proximal);
        assert_eq!(classify_stationarity(&neg, &v(&[0.7]), 1e-12).unwrap(), Stationarity::None);
    }

    #[test]
    fn separation_detects_two_levels() {
        let prob = shifted(&[0.0], Penalty::negabs(1, 1.0));
        let set = StationarySetApprox::analytic(vec![v(&[-1.0]), v(&[1.0])]);
        assert!(check_proper_separation(&set, &prob, &v(&[1.0]), 3.0).unwrap());
        let lopsided = shifted(&[0.2], Penalty::negabs(1, 1.0));
        let set = StationarySetApprox::analytic(vec![v(&[-0.8]), v(&[1.2])]);
        assert!(!check_proper_separation(&set, &lopsided, &v(&[1.2]), 3.0).unwrap());
    }
}
