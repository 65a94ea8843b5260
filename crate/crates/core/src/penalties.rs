//! Nonsmooth penalties: values, exact set-valued proximal maps and
//! proximal/limiting subdifferentials.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cones::{Piece, PolylineGraph};
use crate::error::{check_dim, Error, Result};
use crate::interval::IntervalSet;

/// Relative tolerance under which two prox objective values are a tie.
pub const TIE_TOL: f64 = 1e-12;

/// Combined size above which a separable prox set is not materialised.
const MAX_PROX_SET: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyFamily {
    Zero,
    L1,
    GroupLasso,
    Scad,
    Mcp,
    Negabs,
    BoxIndicator,
}

/// Scalar piece `φ` of a separable penalty `g(x) = Σ φ(xᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarPenalty {
    Zero,
    L1 { lambda: f64 },
    Scad { lambda: f64, a: f64 },
    Mcp { lambda: f64, a: f64 },
    /// `−λ|θ|`, the textbook example with an empty proximal subdifferential at 0.
    NegAbs { lambda: f64 },
    /// Indicator of `[lower, upper]`.
    Box { lower: f64, upper: f64 },
}

/// `c2·θ² + c1·θ + c0` on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPiece {
    pub lo: f64,
    pub hi: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl QuadPiece {
    fn new(lo: f64, hi: f64, c2: f64, c1: f64, c0: f64) -> Self {
        QuadPiece { lo, hi, c2, c1, c0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c2 * t * t + self.c1 * t + self.c0
    }
}

impl ScalarPenalty {
    pub fn family(&self) -> PenaltyFamily {
        match self {
            ScalarPenalty::Zero => PenaltyFamily::Zero,
            ScalarPenalty::L1 { .. } => PenaltyFamily::L1,
            ScalarPenalty::Scad { .. } => PenaltyFamily::Scad,
            ScalarPenalty::Mcp { .. } => PenaltyFamily::Mcp,
            ScalarPenalty::NegAbs { .. } => PenaltyFamily::Negabs,
            ScalarPenalty::Box { .. } => PenaltyFamily::BoxIndicator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        match *self {
            ScalarPenalty::L1 { lambda } | ScalarPenalty::NegAbs { lambda } if !(lambda > 0.0) => {
                bad("lambda must be positive")
            }
            ScalarPenalty::Scad { lambda, a } if !(lambda > 0.0 && a > 2.0) => bad("SCAD needs lambda > 0 and a > 2"),
            ScalarPenalty::Mcp { lambda, a } if !(lambda > 0.0 && a > 1.0) => bad("MCP needs lambda > 0 and a > 1"),
            ScalarPenalty::Box { lower, upper } if !(lower <= upper) => bad("box needs lower <= upper"),
            _ => Ok(()),
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, ScalarPenalty::Zero | ScalarPenalty::L1 { .. } | ScalarPenalty::Box { .. })
    }

    /// Prox-boundedness threshold `γ_g`; every built-in family is bounded
    /// below, so the threshold is infinite.
    pub fn prox_threshold(&self) -> f64 {
        f64::INFINITY
    }

    /// Global Lipschitz constant of `φ` on its domain (`+∞` for the box indicator).
    pub fn lipschitz(&self) -> f64 {
        match *self {
            ScalarPenalty::Zero => 0.0,
            ScalarPenalty::L1 { lambda }
            | ScalarPenalty::NegAbs { lambda }
            | ScalarPenalty::Scad { lambda, .. }
            | ScalarPenalty::Mcp { lambda, .. } => lambda,
            ScalarPenalty::Box { .. } => f64::INFINITY,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarPenalty::Zero => 0.0,
            ScalarPenalty::L1 { lambda } => lambda * t.abs(),
            ScalarPenalty::NegAbs { lambda } => -lambda * t.abs(),
            ScalarPenalty::Scad { lambda, a } => {
                let at = t.abs();
                if at <= lambda {
                    lambda * at
                } else if at <= a * lambda {
                    (-at * at + 2.0 * a * lambda * at - lambda * lambda) / (2.0 * (a - 1.0))
                } else {
                    (a + 1.0) * lambda * lambda / 2.0
                }
            }
            ScalarPenalty::Mcp { lambda, a } => {
                let at = t.abs();
                if at <= a * lambda {
                    lambda * at - at * at / (2.0 * a)
                } else {
                    a * lambda * lambda / 2.0
                }
            }
            ScalarPenalty::Box { lower, upper } => {
                if t >= lower && t <= upper {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// The smooth quadratic pieces covering the domain of `φ`.
    pub fn pieces(&self) -> Vec<QuadPiece> {
        let inf = f64::INFINITY;
        match *self {
            ScalarPenalty::Zero => vec![QuadPiece::new(-inf, inf, 0.0, 0.0, 0.0)],
            ScalarPenalty::L1 { lambda } => vec![
                QuadPiece::new(-inf, 0.0, 0.0, -lambda, 0.0),
                QuadPiece::new(0.0, inf, 0.0, lambda, 0.0),
            ],
            ScalarPenalty::NegAbs { lambda } => vec![
                QuadPiece::new(-inf, 0.0, 0.0, lambda, 0.0),
                QuadPiece::new(0.0, inf, 0.0, -lambda, 0.0),
            ],
            ScalarPenalty::Scad { lambda, a } => {
                let den = 2.0 * (a - 1.0);
                let top = (a + 1.0) * lambda * lambda / 2.0;
                vec![
                    QuadPiece::new(-inf, -a * lambda, 0.0, 0.0, top),
                    QuadPiece::new(-a * lambda, -lambda, -1.0 / den, -2.0 * a * lambda / den, -lambda * lambda / den),
                    QuadPiece::new(-lambda, 0.0, 0.0, -lambda, 0.0),
                    QuadPiece::new(0.0, lambda, 0.0, lambda, 0.0),
                    QuadPiece::new(lambda, a * lambda, -1.0 / den, 2.0 * a * lambda / den, -lambda * lambda / den),
                    QuadPiece::new(a * lambda, inf, 0.0, 0.0, top),
                ]
            }
            ScalarPenalty::Mcp { lambda, a } => {
                let top = a * lambda * lambda / 2.0;
                vec![
                    QuadPiece::new(-inf, -a * lambda, 0.0, 0.0, top),
                    QuadPiece::new(-a * lambda, 0.0, -1.0 / (2.0 * a), -lambda, 0.0),
                    QuadPiece::new(0.0, a * lambda, -1.0 / (2.0 * a), lambda, 0.0),
                    QuadPiece::new(a * lambda, inf, 0.0, 0.0, top),
                ]
            }
            ScalarPenalty::Box { lower, upper } => vec![QuadPiece::new(lower, upper, 0.0, 0.0, 0.0)],
        }
    }

    /// Exact set of global minimisers of `φ(θ) + (θ − u)²/(2γ)` and the optimal value.
    pub fn prox(&self, u: f64, gamma: f64) -> Result<(Vec<f64>, f64)> {
        if !(gamma > 0.0) || gamma >= self.prox_threshold() {
            return Err(Error::NotProxBounded { gamma, threshold: self.prox_threshold() });
        }
        let objective = |t: f64| self.value(t) + (t - u) * (t - u) / (2.0 * gamma);
        let mut candidates: Vec<f64> = Vec::new();
        for piece in self.pieces() {
            let quad = piece.c2 + 1.0 / (2.0 * gamma);
            let lin = piece.c1 - u / gamma;
            if quad > 0.0 {
                candidates.push((-lin / (2.0 * quad)).clamp(piece.lo, piece.hi));
            } else {
                let unbounded_left = piece.lo == f64::NEG_INFINITY && (quad < 0.0 || lin > 0.0);
                let unbounded_right = piece.hi == f64::INFINITY && (quad < 0.0 || lin < 0.0);
                if unbounded_left || unbounded_right {
                    return Err(Error::NotProxBounded { gamma, threshold: self.prox_threshold() });
                }
            }
            candidates.extend([piece.lo, piece.hi].into_iter().filter(|t| t.is_finite()));
        }
        let values: Vec<f64> = candidates.iter().map(|&t| objective(t)).collect();
        let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = TIE_TOL * (1.0 + best.abs());
        let mut minimizers: Vec<f64> = candidates
            .iter()
            .zip(values.iter())
            .filter(|(_, &v)| v <= best + tol)
            .map(|(&t, _)| t)
            .collect();
        minimizers.sort_by(f64::total_cmp);
        minimizers.dedup_by(|a, b| (*a - *b).abs() <= TIE_TOL * (1.0 + a.abs()));
        Ok((minimizers, best))
    }

    /// The proximal subdifferential `∂^πφ(θ)`.
    pub fn prox_subdiff(&self, t: f64) -> IntervalSet {
        match *self {
            ScalarPenalty::Zero => IntervalSet::point(0.0),
            ScalarPenalty::L1 { lambda } => {
                if t > 0.0 {
                    IntervalSet::point(lambda)
                } else if t < 0.0 {
                    IntervalSet::point(-lambda)
                } else {
                    IntervalSet::closed(-lambda, lambda)
                }
            }
            ScalarPenalty::NegAbs { lambda } => {
                if t > 0.0 {
                    IntervalSet::point(-lambda)
                } else if t < 0.0 {
                    IntervalSet::point(lambda)
                } else {
                    IntervalSet::empty()
                }
            }
            ScalarPenalty::Scad { lambda, a } => {
                let v = if t < -a * lambda {
                    0.0
                } else if t < -lambda {
                    -t / (a - 1.0) - a * lambda / (a - 1.0)
                } else if t < 0.0 {
                    -lambda
                } else if t == 0.0 {
                    return IntervalSet::closed(-lambda, lambda);
                } else if t <= lambda {
                    lambda
                } else if t <= a * lambda {
                    (a * lambda - t) / (a - 1.0)
                } else {
                    0.0
                };
                IntervalSet::point(v)
            }
            ScalarPenalty::Mcp { lambda, a } => {
                let v = if t < -a * lambda {
                    0.0
                } else if t < 0.0 {
                    -lambda - t / a
                } else if t == 0.0 {
                    return IntervalSet::closed(-lambda, lambda);
                } else if t <= a * lambda {
                    lambda - t / a
                } else {
                    0.0
                };
                IntervalSet::point(v)
            }
            ScalarPenalty::Box { lower, upper } => {
                if t < lower || t > upper {
                    IntervalSet::empty()
                } else if lower == upper {
                    IntervalSet::real_line()
                } else if t == lower {
                    IntervalSet::closed(f64::NEG_INFINITY, 0.0)
                } else if t == upper {
                    IntervalSet::closed(0.0, f64::INFINITY)
                } else {
                    IntervalSet::point(0.0)
                }
            }
        }
    }

    /// The limiting subdifferential `∂φ(θ)`; differs from the proximal one
    /// only for the downward kink of `−λ|θ|`.
    pub fn limiting_subdiff(&self, t: f64) -> IntervalSet {
        match *self {
            ScalarPenalty::NegAbs { lambda } if t == 0.0 => IntervalSet::from_points(&[-lambda, lambda]),
            _ => self.prox_subdiff(t),
        }
    }

    /// Exact polyline graph of `∂^πφ`.
    pub fn graph(&self) -> PolylineGraph {
        let pieces = match *self {
            ScalarPenalty::Zero => vec![Piece::ray([0.0, 0.0], [-1.0, 0.0]), Piece::ray([0.0, 0.0], [1.0, 0.0])],
            ScalarPenalty::L1 { lambda } => vec![
                Piece::ray([0.0, -lambda], [-1.0, 0.0]),
                Piece::segment([0.0, -lambda], [0.0, lambda]),
                Piece::ray([0.0, lambda], [1.0, 0.0]),
            ],
            ScalarPenalty::NegAbs { lambda } => vec![
                Piece::open_ray([0.0, lambda], [-1.0, 0.0]),
                Piece::open_ray([0.0, -lambda], [1.0, 0.0]),
            ],
            ScalarPenalty::Scad { lambda, a } => vec![
                Piece::ray([-a * lambda, 0.0], [-1.0, 0.0]),
                Piece::segment([-a * lambda, 0.0], [-lambda, -lambda]),
                Piece::segment([-lambda, -lambda], [0.0, -lambda]),
                Piece::segment([0.0, -lambda], [0.0, lambda]),
                Piece::segment([0.0, lambda], [lambda, lambda]),
                Piece::segment([lambda, lambda], [a * lambda, 0.0]),
                Piece::ray([a * lambda, 0.0], [1.0, 0.0]),
            ],
            ScalarPenalty::Mcp { lambda, a } => vec![
                Piece::ray([-a * lambda, 0.0], [-1.0, 0.0]),
                Piece::segment([-a * lambda, 0.0], [0.0, -lambda]),
                Piece::segment([0.0, -lambda], [0.0, lambda]),
                Piece::segment([0.0, lambda], [a * lambda, 0.0]),
                Piece::ray([a * lambda, 0.0], [1.0, 0.0]),
            ],
            ScalarPenalty::Box { lower, upper } => {
                if lower == upper {
                    vec![Piece::ray([lower, 0.0], [0.0, -1.0]), Piece::ray([lower, 0.0], [0.0, 1.0])]
                } else {
                    vec![
                        Piece::ray([lower, 0.0], [0.0, -1.0]),
                        Piece::segment([lower, 0.0], [upper, 0.0]),
                        Piece::ray([upper, 0.0], [0.0, 1.0]),
                    ]
                }
            }
        };
        PolylineGraph::new(pieces)
    }
}

/// Exact output of a proximal map: every global minimiser and the common value.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult {
    pub minimizers: Vec<DVector<f64>>,
    pub objective_value: f64,
}

/// A nonsmooth part `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum Penalty {
    Separable { n: usize, phi: ScalarPenalty },
    /// `Σ_J ω_J ‖x_J‖₂` over a partition of the coordinates.
    GroupLasso { n: usize, groups: Vec<Vec<usize>>, weights: Vec<f64> },
}

impl Penalty {
    pub fn separable(n: usize, phi: ScalarPenalty) -> Self {
        Penalty::Separable { n, phi }
    }

    pub fn zero(n: usize) -> Self {
        Self::separable(n, ScalarPenalty::Zero)
    }

    pub fn l1(n: usize, lambda: f64) -> Self {
        Self::separable(n, ScalarPenalty::L1 { lambda })
    }

    pub fn scad(n: usize, lambda: f64, a: f64) -> Self {
        Self::separable(n, ScalarPenalty::Scad { lambda, a })
    }

    pub fn mcp(n: usize, lambda: f64, a: f64) -> Self {
        Self::separable(n, ScalarPenalty::Mcp { lambda, a })
    }

    pub fn negabs(n: usize, lambda: f64) -> Self {
        Self::separable(n, ScalarPenalty::NegAbs { lambda })
    }

    pub fn box_indicator(n: usize, lower: f64, upper: f64) -> Self {
        Self::separable(n, ScalarPenalty::Box { lower, upper })
    }

    pub fn group_lasso(groups: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        let n = groups.iter().map(|g| g.len()).sum();
        let p = Penalty::GroupLasso { n, groups, weights };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        match self {
            Penalty::Separable { n, .. } | Penalty::GroupLasso { n, .. } => *n,
        }
    }

    pub fn family(&self) -> PenaltyFamily {
        match self {
            Penalty::Separable { phi, .. } => phi.family(),
            Penalty::GroupLasso { .. } => PenaltyFamily::GroupLasso,
        }
    }

    pub fn scalar(&self) -> Option<&ScalarPenalty> {
        match self {
            Penalty::Separable { phi, .. } => Some(phi),
            Penalty::GroupLasso { .. } => None,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Penalty::Separable { phi, .. } => phi.is_convex(),
            Penalty::GroupLasso { .. } => true,
        }
    }

    pub fn prox_threshold(&self) -> f64 {
        match self {
            Penalty::Separable { phi, .. } => phi.prox_threshold(),
            Penalty::GroupLasso { .. } => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Penalty::Separable { phi, .. } => phi.validate(),
            Penalty::GroupLasso { n, groups, weights } => {
                if groups.len() != weights.len() {
                    return Err(Error::InvalidConfig("one weight per group required".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(Error::InvalidConfig("group weights must be nonnegative".into()));
                }
                let mut seen = vec![false; *n];
                for &i in groups.iter().flatten() {
                    if i >= *n || seen[i] {
                        return Err(Error::InvalidConfig("groups must partition the coordinates".into()));
                    }
                    seen[i] = true;
                }
                if seen.iter().any(|s| !s) {
                    return Err(Error::InvalidConfig("groups must cover every coordinate".into()));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            Penalty::Separable { phi, .. } => x.iter().map(|&t| phi.value(t)).sum(),
            Penalty::GroupLasso { groups, weights, .. } => groups
                .iter()
                .zip(weights)
                .map(|(g, w)| w * g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt())
                .sum(),
        }
    }

    /// Per-coordinate prox sets for separable penalties.
    pub fn prox_coordinates(&self, u: &DVector<f64>, gamma: f64) -> Result<Vec<(Vec<f64>, f64)>> {
        check_dim(self.dim(), u.len())?;
        let phi = self.scalar().ok_or(Error::NotSeparable)?;
        u.iter().map(|&ui| phi.prox(ui, gamma)).collect()
    }

    /// The exact prox set `Prox_g^γ(u)`.
    pub fn prox(&self, u: &DVector<f64>, gamma: f64) -> Result<ProxResult> {
        check_dim(self.dim(), u.len())?;
        match self {
            Penalty::Separable { .. } => {
                let coords = self.prox_coordinates(u, gamma)?;
                let total: usize = coords.iter().map(|(s, _)| s.len()).product();
                if total > MAX_PROX_SET {
                    return Err(Error::InvalidConfig(format!("prox set of size {total} is too large to enumerate")));
                }
                let mut minimizers = vec![DVector::zeros(u.len())];
                for (i, (set, _)) in coords.iter().enumerate() {
                    let mut next = Vec::with_capacity(minimizers.len() * set.len());
                    for m in &minimizers {
                        for &t in set {
                            let mut m2 = m.clone();
                            m2[i] = t;
                            next.push(m2);
                        }
                    }
                    minimizers = next;
                }
                let objective_value = coords.iter().map(|(_, v)| v).sum();
                Ok(ProxResult { minimizers, objective_value })
            }
            Penalty::GroupLasso { .. } => {
                let x = self.group_prox(u, gamma)?;
                let objective_value = self.value(&x) + (&x - u).norm_squared() / (2.0 * gamma);
                Ok(ProxResult { minimizers: vec![x], objective_value })
            }
        }
    }

    fn group_prox(&self, u: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
        let Penalty::GroupLasso { groups, weights, .. } = self else {
            unreachable!()
        };
        if !(gamma > 0.0) {
            return Err(Error::NotProxBounded { gamma, threshold: f64::INFINITY });
        }
        let mut x = DVector::zeros(u.len());
        for (g, w) in groups.iter().zip(weights) {
            let norm = g.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt();
            if norm > 0.0 {
                let shrink = (1.0 - gamma * w / norm).max(0.0);
                for &i in g {
                    x[i] = shrink * u[i];
                }
            }
        }
        Ok(x)
    }

    /// One element of the prox set: the minimiser closest to `anchor`,
    /// ties broken lexicographically.
    pub fn prox_select(&self, u: &DVector<f64>, gamma: f64, anchor: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), anchor.len())?;
        match self {
            Penalty::Separable { .. } => {
                let coords = self.prox_coordinates(u, gamma)?;
                // Euclidean closeness and lexicographic order both decompose per coordinate
                Ok(DVector::from_iterator(
                    u.len(),
                    coords.iter().enumerate().map(|(i, (set, _))| {
                        let a = anchor[i];
                        set.iter()
                            .copied()
                            .min_by(|p, q| (p - a).abs().total_cmp(&(q - a).abs()).then(p.total_cmp(q)))
                            .expect("prox set is non-empty")
                    }),
                ))
            }
            Penalty::GroupLasso { .. } => self.group_prox(u, gamma),
        }
    }

    pub fn prox_subdiff_scalar(&self, t: f64) -> Result<IntervalSet> {
        Ok(self.scalar().ok_or(Error::NotSeparable)?.prox_subdiff(t))
    }

    pub fn limiting_subdiff_scalar(&self, t: f64) -> Result<IntervalSet> {
        Ok(self.scalar().ok_or(Error::NotSeparable)?.limiting_subdiff(t))
    }

    pub fn graph(&self) -> Result<PolylineGraph> {
        match self {
            Penalty::Separable { phi, .. } => Ok(phi.graph()),
            Penalty::GroupLasso { .. } => Err(Error::NoGraph),
        }
    }

    /// `dist(v, ∂^πg(x))`; `+∞` when the subdifferential is empty.
    pub fn subdiff_distance(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.subdiff_distance_with(x, v, false)
    }

    /// `dist(v, ∂g(x))` with the limiting subdifferential.
    pub fn limiting_subdiff_distance(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.subdiff_distance_with(x, v, true)
    }

    fn subdiff_distance_with(&self, x: &DVector<f64>, v: &DVector<f64>, limiting: bool) -> f64 {
        match self {
            Penalty::Separable { phi, .. } => x
                .iter()
                .zip(v.iter())
                .map(|(&t, &vi)| {
                    let set = if limiting { phi.limiting_subdiff(t) } else { phi.prox_subdiff(t) };
                    set.distance(vi).powi(2)
                })
                .sum::<f64>()
                .sqrt(),
            Penalty::GroupLasso { groups, weights, .. } => groups
                .iter()
                .zip(weights)
                .map(|(g, w)| {
                    let xn = g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
                    if xn > 0.0 {
                        g.iter().map(|&i| (v[i] - w * x[i] / xn).powi(2)).sum::<f64>()
                    } else {
                        let vn = g.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
                        (vn - w).max(0.0).powi(2)
                    }
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SCAD: ScalarPenalty = ScalarPenalty::Scad { lambda: 1.0, a: 3.0 };
    const MCP: ScalarPenalty = ScalarPenalty::Mcp { lambda: 1.0, a: 2.0 };

    #[test]
    fn values_from_definitions() {
        assert_eq!(SCAD.value(5.0), 2.0);
        assert_eq!(MCP.value(5.0), 1.0);
        let g = Penalty::l1(2, 2.0);
        assert_eq!(g.value(&DVector::from_vec(vec![1.0, -3.0])), 8.0);
    }

    #[test]
    fn values_are_continuous_at_breakpoints() {
        for phi in [SCAD, MCP] {
            for b in [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0] {
                assert!((phi.value(b - 1e-12) - phi.value(b + 1e-12)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pieces_agree_with_value() {
        for phi in [SCAD, MCP, ScalarPenalty::L1 { lambda: 0.7 }, ScalarPenalty::NegAbs { lambda: 0.3 }] {
            for piece in phi.pieces() {
                let lo = piece.lo.max(-10.0);
                let hi = piece.hi.min(10.0);
                for k in 0..=10 {
                    let t = lo + (hi - lo) * k as f64 / 10.0;
                    assert!((piece.eval(t) - phi.value(t)).abs() < 1e-12, "{phi:?} at {t}");
                }
            }
        }
    }

    #[test]
    fn prox_examples() {
        let l1 = ScalarPenalty::L1 { lambda: 1.0 };
        assert_eq!(l1.prox(3.0, 1.0).unwrap().0, vec![2.0]);
        let neg = ScalarPenalty::NegAbs { lambda: 1.0 };
        assert_eq!(neg.prox(0.0, 1.0).unwrap().0, vec![-1.0, 1.0]);
        assert_eq!(ScalarPenalty::Zero.prox(7.0, 0.3).unwrap().0, vec![7.0]);
        let g = Penalty::group_lasso(vec![vec![0, 1]], vec![1.0]).unwrap();
        let r = g.prox(&DVector::from_vec(vec![3.0, 4.0]), 1.0).unwrap();
        assert!((r.minimizers[0].clone() - DVector::from_vec(vec![2.4, 3.2])).amax() < 1e-15);
    }

    #[test]
    fn negabs_vector_prox_is_a_product() {
        let g = Penalty::negabs(2, 1.0);
        let r = g.prox(&DVector::zeros(2), 0.5).unwrap();
        assert_eq!(r.minimizers.len(), 4);
        let sel = g.prox_select(&DVector::zeros(2), 0.5, &DVector::from_vec(vec![0.1, -0.2])).unwrap();
        assert_eq!(sel, DVector::from_vec(vec![0.5, -0.5]));
        let tie = g.prox_select(&DVector::zeros(2), 0.5, &DVector::zeros(2)).unwrap();
        assert_eq!(tie, DVector::from_vec(vec![-0.5, -0.5]));
    }

    #[test]
    fn subdifferential_examples() {
        assert_eq!(SCAD.prox_subdiff(0.0), IntervalSet::closed(-1.0, 1.0));
        assert_eq!(SCAD.prox_subdiff(4.0), IntervalSet::point(0.0));
        assert!(ScalarPenalty::NegAbs { lambda: 1.0 }.prox_subdiff(0.0).is_empty());
        assert_eq!(MCP.prox_subdiff(1.0), IntervalSet::point(0.5));
        assert_eq!(
            ScalarPenalty::NegAbs { lambda: 1.0 }.limiting_subdiff(0.0),
            IntervalSet::from_points(&[-1.0, 1.0])
        );
        assert_eq!(ScalarPenalty::L1 { lambda: 2.0 }.limiting_subdiff(-1.0), IntervalSet::point(-2.0));
        let g = Penalty::group_lasso(vec![vec![0, 1]], vec![1.0]).unwrap();
        assert_eq!(g.prox_subdiff_scalar(0.0).unwrap_err(), Error::NotSeparable);
        assert_eq!(g.graph().unwrap_err(), Error::NoGraph);
    }

    #[test]
    fn mcp_derivative_matches_difference_quotients() {
        for t in [-1.7, -0.4, 0.3, 1.0, 1.9, 2.5] {
            let h = 1e-7;
            let fd = (MCP.value(t + h) - MCP.value(t - h)) / (2.0 * h);
            assert!(MCP.prox_subdiff(t).contains(fd, 1e-6), "t = {t}");
        }
    }

    #[test]
    fn group_partition_is_validated() {
        assert!(Penalty::group_lasso(vec![vec![0, 0]], vec![1.0]).is_err());
        assert!(Penalty::group_lasso(vec![vec![0], vec![1]], vec![1.0]).is_err());
    }

    #[test]
    fn graph_piece_counts() {
        assert_eq!(ScalarPenalty::L1 { lambda: 1.0 }.graph().pieces().len(), 3);
        assert_eq!(SCAD.graph().pieces().len(), 7);
        assert_eq!(MCP.graph().pieces().len(), 5);
    }

    fn families() -> Vec<ScalarPenalty> {
        vec![
            ScalarPenalty::Zero,
            ScalarPenalty::L1 { lambda: 0.8 },
            ScalarPenalty::Scad { lambda: 1.0, a: 3.7 },
            ScalarPenalty::Mcp { lambda: 0.6, a: 2.5 },
            ScalarPenalty::NegAbs { lambda: 0.9 },
            ScalarPenalty::Box { lower: -1.0, upper: 2.0 },
        ]
    }

    proptest! {
        #[test]
        fn prox_optimality_condition(idx in 0usize..6, u in -6.0f64..6.0, gamma in 0.05f64..3.0) {
            let phi = families()[idx];
            let (set, _) = phi.prox(u, gamma).unwrap();
            for t in set {
                let v = (u - t) / gamma;
                prop_assert!(phi.prox_subdiff(t).contains(v, 1e-9), "{phi:?} u={u} gamma={gamma} t={t}");
            }
        }

        #[test]
        fn semi_convex_families_have_equal_subdifferentials(t in -5.0f64..5.0) {
            for phi in [SCAD, MCP, ScalarPenalty::L1 { lambda: 1.0 }] {
                prop_assert_eq!(phi.prox_subdiff(t), phi.limiting_subdiff(t));
            }
        }
    }
}
