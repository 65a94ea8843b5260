//! Brute-force ground truth: grid-scan global minimisation, proximal maps and
//! stationary sets for problems in one or two dimensions.
//!
//! Nothing here reuses the analytic machinery of [`crate::penalties`] beyond
//! penalty values and graphs, so it can serve as an independent check.

use nalgebra::{DMatrix, DVector};

use crate::cones::{Piece, PolylineGraph};
use crate::error::{check_dim, Error, Result};
use crate::penalties::ScalarPenalty;
use crate::problem::{Bounds, ProblemSpec};
use crate::stationary::{StationaryMethod, StationarySetApprox};

/// Default prox window is `PROX_WINDOW · (1 + |u|)`.
pub const PROX_WINDOW: f64 = 50.0;
pub const PROX_GRID: f64 = 1e-5;
/// Cells per axis of the stationary-set scan.
pub const STATIONARY_CELLS: usize = 400;
/// Solutions closer than this are merged.
const DEDUP: f64 = 1e-7;
const INVPHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    // the bracket endpoints matter at kinks sitting on the boundary
    [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
}

/// All global minimisers of `f` on `[lo, hi]`: grid scan with step `step`,
/// golden-section refinement in every discrete basin, then a tie filter on
/// refined values. Minimisers sitting on the interval's ends are flagged.
pub fn minimize_1d(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> Result<(Vec<(f64, f64)>, bool)> {
    let n = ((hi - lo) / step).ceil() as usize;
    if !(2..=2_000_000_000).contains(&n) {
        return Err(Error::OracleWindow(format!("{n} grid points")));
    }
    let at = |j: usize| if j == n { hi } else { lo + j as f64 * step };
    let mut basins: Vec<usize> = Vec::new();
    let (mut prev, mut cur) = (f64::INFINITY, f(at(0)));
    for j in 0..=n {
        let next = if j < n { f(at(j + 1)) } else { f64::INFINITY };
        if cur.is_finite() && cur <= prev && cur <= next {
            basins.push(j);
        }
        prev = cur;
        cur = next;
    }
    if basins.is_empty() {
        return Err(Error::OracleNoSolution);
    }
    let refined: Vec<(f64, f64)> = basins
        .iter()
        .map(|&j| {
            let a = at(j.saturating_sub(1));
            let b = at((j + 1).min(n));
            golden_section(f, a, b, 1e-13 * (1.0 + a.abs().max(b.abs())))
        })
        .collect();
    let best = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-10 * (1.0 + best.abs());
    let mut out: Vec<(f64, f64)> = refined.into_iter().filter(|r| r.1 <= best + tol).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() <= 10.0 * step);
    let edge = out.iter().any(|r| r.0 <= lo + step || r.0 >= hi - step);
    Ok((out, edge))
}

/// Brute-force `Prox_φ^γ(u)`: grid minimisation of `φ(θ) + (θ − u)²/(2γ)`
/// over `[u − window, u + window]`, widening the window tenfold once when the
/// minimiser sits on its boundary.
pub fn brute_force_prox(phi: &ScalarPenalty, u: f64, gamma: f64, window: Option<f64>, grid: f64) -> Result<Vec<f64>> {
    let obj = |t: f64| phi.value(t) + (t - u) * (t - u) / (2.0 * gamma);
    let mut w = window.unwrap_or(PROX_WINDOW * (1.0 + u.abs()));
    for attempt in 0..2 {
        match minimize_1d(&obj, u - w, u + w, grid) {
            Ok((mins, false)) => return Ok(mins.into_iter().map(|m| m.0).collect()),
            Ok(_) | Err(Error::OracleNoSolution) => {}
            Err(e) => return Err(e),
        }
        if attempt == 0 {
            w *= 10.0;
        }
    }
    Err(Error::OracleWindow(format!("minimiser on the boundary of [u - {w}, u + {w}]")))
}

/// Compass search from `x0` with initial step `h`, stopping below `tol`.
pub fn compass_search(f: &dyn Fn(&DVector<f64>) -> f64, x0: DVector<f64>, mut h: f64, tol: f64) -> (DVector<f64>, f64) {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    while h > tol {
        let mut moved = false;
        'dirs: for i in 0..n {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += s * h;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break 'dirs;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// Global minimisers of `f` over a box in one or two dimensions using
/// `cells` grid cells per axis, each candidate basin refined by compass
/// search. Returns the minimisers and whether any sits on the box boundary.
pub fn minimize_box(f: &dyn Fn(&DVector<f64>) -> f64, bounds: &Bounds, cells: usize) -> Result<(Vec<DVector<f64>>, f64, bool)> {
    let n = bounds.dim();
    if n == 0 || n > 2 {
        return Err(Error::TooManyCoordinates { n, limit: 2 });
    }
    let h: Vec<f64> = (0..n).map(|i| (bounds.upper[i] - bounds.lower[i]) / cells as f64).collect();
    let m = cells + 1;
    let count = if n == 1 { m } else { m * m };
    let point = |idx: usize| -> DVector<f64> {
        let ij = [idx % m, idx / m];
        DVector::from_fn(n, |i, _| bounds.lower[i] + ij[i] as f64 * h[i])
    };
    let vals: Vec<f64> = (0..count).map(|idx| f(&point(idx))).collect();
    let neighbours = |idx: usize| -> Vec<usize> {
        let (i, j) = (idx % m, idx / m);
        let mut out = Vec::new();
        if i > 0 {
            out.push(idx - 1);
        }
        if i + 1 < m {
            out.push(idx + 1);
        }
        if n == 2 {
            if j > 0 {
                out.push(idx - m);
            }
            if j + 1 < m {
                out.push(idx + m);
            }
        }
        out
    };
    let mut seeds: Vec<usize> =
        (0..count).filter(|&k| vals[k].is_finite() && neighbours(k).iter().all(|&q| vals[k] <= vals[q])).collect();
    if seeds.is_empty() {
        return Err(Error::OracleNoSolution);
    }
    seeds.sort_by(|a, b| vals[*a].total_cmp(&vals[*b]));
    seeds.truncate(64);
    let hmax = h.iter().cloned().fold(0.0, f64::max);
    let clamp_f = |x: &DVector<f64>| if bounds.contains(x) { f(x) } else { f64::INFINITY };
    let refined: Vec<(DVector<f64>, f64)> =
        seeds.iter().map(|&s| compass_search(&clamp_f, point(s), hmax, 1e-13 * (1.0 + hmax))).collect();
    let best = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-10 * (1.0 + best.abs());
    let mut out: Vec<DVector<f64>> = Vec::new();
    for (x, v) in refined {
        if v <= best + tol && !out.iter().any(|y| (y - &x).norm() <= 10.0 * hmax) {
            out.push(x);
        }
    }
    let edge = out
        .iter()
        .any(|x| (0..n).any(|i| x[i] <= bounds.lower[i] + hmax || x[i] >= bounds.upper[i] - hmax));
    Ok((out, best, edge))
}

/// Which perturbed inclusion to solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetValuedMap {
    /// `p ∈ ∇f(x) + ∂^πg(x)`.
    SCano,
    /// `p/γ ∈ ∇f(x + p) + ∂^πg(x)`.
    SPg { gamma: f64 },
}

/// Outcome of a stationary-set scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolutions {
    pub points: Vec<DVector<f64>>,
    /// Some solution lies on the scanned box's boundary.
    pub boundary_hit: bool,
}

/// `x ↦ target(x)` whose graph membership `(xᵢ, target_i(x)) ∈ gph ∂^πφ` is solved.
struct Target<'a> {
    prob: &'a ProblemSpec,
    shift: DVector<f64>,
    offset: DVector<f64>,
}

impl Target<'_> {
    fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.offset - self.prob.gradient(&(x + &self.shift))?)
    }

    fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(-self.prob.loss.hessian(&(x + &self.shift))?)
    }
}

fn separable_graph(prob: &ProblemSpec, limiting: bool) -> Result<PolylineGraph> {
    let g = prob.penalty.graph()?;
    Ok(if limiting { g.closure() } else { g })
}

/// `𝒳^π ∩ box`.
pub fn brute_force_stationary_set(prob: &ProblemSpec, bounds: &Bounds, cells: usize) -> Result<StationarySetApprox> {
    let sol = solve_inclusion(prob, &DVector::zeros(prob.n), &DVector::zeros(prob.n), bounds, cells, false)?;
    Ok(StationarySetApprox { points: sol.points, radius: 1e-8, method: StationaryMethod::OracleGrid })
}

/// Limiting stationary points `𝒳^L ∩ box`, from the closure of the graph.
pub fn brute_force_limiting_set(prob: &ProblemSpec, bounds: &Bounds, cells: usize) -> Result<StationarySetApprox> {
    let sol = solve_inclusion(prob, &DVector::zeros(prob.n), &DVector::zeros(prob.n), bounds, cells, true)?;
    Ok(StationarySetApprox { points: sol.points, radius: 1e-8, method: StationaryMethod::OracleGrid })
}

/// All `x` in the box with `p ∈ S(x)` for the chosen perturbed map.
pub fn brute_force_set_valued_solve(
    prob: &ProblemSpec,
    map: SetValuedMap,
    p: &DVector<f64>,
    bounds: &Bounds,
    cells: usize,
) -> Result<OracleSolutions> {
    check_dim(prob.n, p.len())?;
    match map {
        SetValuedMap::SCano => solve_inclusion(prob, &DVector::zeros(prob.n), p, bounds, cells, false),
        SetValuedMap::SPg { gamma } => solve_inclusion(prob, p, &(p / gamma), bounds, cells, false),
    }
}

/// A coordinate's choice of graph piece, reduced to either a fixed value
/// with an interval constraint on the target, or a linear relation
/// `target = slope·x + intercept` on a range of x.
#[derive(Debug, Clone, Copy)]
enum Branch {
    Fixed { x: f64, lo: f64, hi: f64 },
    Linear { slope: f64, intercept: f64, lo: f64, hi: f64, open_lo: bool, open_hi: bool },
}

fn branch_of(piece: &Piece) -> Branch {
    let end = piece.end();
    if piece.is_vertical() {
        let a = piece.start[1];
        let b = end.map_or(piece.dir[1].signum() * f64::INFINITY, |e| e[1]);
        return Branch::Fixed { x: piece.start[0], lo: a.min(b), hi: a.max(b) };
    }
    let slope = piece.dir[1] / piece.dir[0];
    let intercept = piece.start[1] - slope * piece.start[0];
    let x0 = piece.start[0];
    let x1 = end.map_or(piece.dir[0].signum() * f64::INFINITY, |e| e[0]);
    let forward = x1 > x0;
    Branch::Linear {
        slope,
        intercept,
        lo: x0.min(x1),
        hi: x0.max(x1),
        open_lo: piece.open_start && forward,
        open_hi: piece.open_start && !forward,
    }
}

const ENDPOINT_TOL: f64 = 1e-10;

fn branch_accepts(b: &Branch, x: f64, t: f64, tol: f64) -> bool {
    match *b {
        Branch::Fixed { x: c, lo, hi } => (x - c).abs() <= tol && t >= lo - tol && t <= hi + tol,
        Branch::Linear { slope, intercept, lo, hi, open_lo, open_hi } => {
            let in_lo = if open_lo { x > lo + ENDPOINT_TOL } else { x >= lo - ENDPOINT_TOL };
            let in_hi = if open_hi { x < hi - ENDPOINT_TOL } else { x <= hi + ENDPOINT_TOL };
            in_lo && in_hi && (t - slope * x - intercept).abs() <= tol
        }
    }
}

fn solve_inclusion(
    prob: &ProblemSpec,
    shift: &DVector<f64>,
    offset: &DVector<f64>,
    bounds: &Bounds,
    cells: usize,
    limiting: bool,
) -> Result<OracleSolutions> {
    let n = prob.n;
    if n > 2 {
        return Err(Error::TooManyCoordinates { n, limit: 2 });
    }
    check_dim(n, bounds.dim())?;
    let graph = separable_graph(prob, limiting)?;
    let branches: Vec<Branch> = graph.pieces().iter().map(branch_of).collect();
    let target = Target { prob, shift: shift.clone(), offset: offset.clone() };
    let scale = 1.0 + offset.amax();
    let accept_tol = 1e-8 * scale;

    let mut found: Vec<DVector<f64>> = Vec::new();
    let mut push = |x: DVector<f64>| {
        if !found.iter().any(|y| (y - &x).norm() <= DEDUP) {
            found.push(x);
        }
    };
    let accepts = |x: &DVector<f64>, combo: &[Branch]| -> Result<bool> {
        if !bounds.contains(x) && bounds.distance(x) > 1e-12 {
            return Ok(false);
        }
        let t = target.eval(x)?;
        Ok((0..n).all(|i| branch_accepts(&combo[i], x[i], t[i], accept_tol)))
    };

    let grid = if n == 2 { Some(TargetGrid::new(&target, bounds, cells)?) } else { None };
    let nb = branches.len();
    let combos = nb.pow(n as u32);
    for c in 0..combos {
        let combo: Vec<Branch> = (0..n).map(|i| branches[(c / nb.pow(i as u32)) % nb]).collect();
        for x in solve_combo(&target, &combo, bounds, cells, grid.as_ref())? {
            if accepts(&x, &combo)? {
                push(x);
            }
        }
    }
    found.sort_by(|a, b| a.iter().zip(b.iter()).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    let h = (0..n).map(|i| (bounds.upper[i] - bounds.lower[i]) / cells as f64).fold(0.0, f64::max);
    let boundary_hit =
        found.iter().any(|x| (0..n).any(|i| x[i] <= bounds.lower[i] + 1e-9 * (1.0 + h) || x[i] >= bounds.upper[i] - 1e-9 * (1.0 + h)));
    Ok(OracleSolutions { points: found, boundary_hit })
}

/// Residual of the linear branch equations at `x`; fixed coordinates give 0.
fn combo_residual(target: &Target, combo: &[Branch], x: &DVector<f64>) -> Result<DVector<f64>> {
    let t = target.eval(x)?;
    Ok(DVector::from_fn(x.len(), |i, _| match combo[i] {
        Branch::Fixed { .. } => 0.0,
        Branch::Linear { slope, intercept, .. } => t[i] - slope * x[i] - intercept,
    }))
}

fn branch_range(b: &Branch, lo: f64, hi: f64) -> Option<(f64, f64)> {
    match *b {
        Branch::Fixed { x, .. } => (x >= lo && x <= hi).then_some((x, x)),
        Branch::Linear { lo: a, hi: c, .. } => {
            let (p, q) = (a.max(lo), c.min(hi));
            (p <= q).then_some((p, q))
        }
    }
}

fn solve_combo(target: &Target, combo: &[Branch], bounds: &Bounds, cells: usize, grid: Option<&TargetGrid>) -> Result<Vec<DVector<f64>>> {
    let n = combo.len();
    let mut ranges = Vec::with_capacity(n);
    for (i, branch) in combo.iter().enumerate() {
        match branch_range(branch, bounds.lower[i], bounds.upper[i]) {
            Some(r) => ranges.push(r),
            None => return Ok(Vec::new()),
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| matches!(combo[i], Branch::Linear { .. })).collect();
    let base = DVector::from_fn(n, |i, _| ranges[i].0);
    match free.len() {
        0 => Ok(vec![base]),
        1 => {
            let i = free[0];
            let (lo, hi) = ranges[i];
            let h = |t: f64| -> Result<f64> {
                let mut x = base.clone();
                x[i] = t;
                Ok(combo_residual(target, combo, &x)?[i])
            };
            let roots = roots_1d(&h, lo, hi, cells)?;
            Ok(roots
                .into_iter()
                .map(|t| {
                    let mut x = base.clone();
                    x[i] = t;
                    x
                })
                .collect())
        }
        _ => {
            let grid = grid.expect("grid is built for two free coordinates");
            grid.solve(target, combo, &ranges)
        }
    }
}

/// Roots of a continuous `h` on `[lo, hi]`: sign changes on a uniform grid
/// refined by bisection. An identically vanishing `h` yields the grid itself.
fn roots_1d(h: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64, cells: usize) -> Result<Vec<f64>> {
    if lo == hi {
        return Ok(if h(lo)?.abs() <= 1e-12 { vec![lo] } else { vec![] });
    }
    let step = (hi - lo) / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|j| if j == cells { hi } else { lo + j as f64 * step }).collect();
    let vals: Vec<f64> = xs.iter().map(|&t| h(t)).collect::<Result<_>>()?;
    let scale = 1.0 + vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let zero_tol = 1e-13 * scale;
    let mut roots = Vec::new();
    for j in 0..=cells {
        if vals[j].abs() <= zero_tol {
            roots.push(xs[j]);
        } else if j < cells && vals[j + 1].abs() > zero_tol && vals[j].signum() != vals[j + 1].signum() {
            let (mut a, mut b, mut fa) = (xs[j], xs[j + 1], vals[j]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = h(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    Ok(roots)
}

/// The target sampled on a `(cells+1)²` grid over the box.
struct TargetGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    t: Vec<DVector<f64>>,
}

impl TargetGrid {
    fn new(target: &Target, bounds: &Bounds, cells: usize) -> Result<Self> {
        let axis = |i: usize| -> Vec<f64> {
            let step = (bounds.upper[i] - bounds.lower[i]) / cells as f64;
            (0..=cells).map(|j| if j == cells { bounds.upper[i] } else { bounds.lower[i] + j as f64 * step }).collect()
        };
        let xs = axis(0);
        let ys = axis(1);
        let pts: Vec<DVector<f64>> =
            ys.iter().flat_map(|&y| xs.iter().map(move |&x| DVector::from_vec(vec![x, y]))).collect();
        #[cfg(feature = "parallel")]
        let t = {
            use rayon::prelude::*;
            pts.par_iter().map(|p| target.eval(p)).collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let t = pts.iter().map(|p| target.eval(p)).collect::<Result<Vec<_>>>()?;
        Ok(TargetGrid { xs, ys, t })
    }

    fn solve(&self, target: &Target, combo: &[Branch], ranges: &[(f64, f64)]) -> Result<Vec<DVector<f64>>> {
        let m = self.xs.len();
        let lin = |b: &Branch| match *b {
            Branch::Linear { slope, intercept, .. } => (slope, intercept),
            Branch::Fixed { .. } => unreachable!(),
        };
        let (s0, c0) = lin(&combo[0]);
        let (s1, c1) = lin(&combo[1]);
        let cell_range = |axis: &[f64], lo: f64, hi: f64| -> (usize, usize) {
            let a = axis.partition_point(|&v| v < lo).saturating_sub(1);
            let b = axis.partition_point(|&v| v <= hi).min(axis.len() - 1);
            (a, b.max(a))
        };
        let (i0, i1) = cell_range(&self.xs, ranges[0].0, ranges[0].1);
        let (j0, j1) = cell_range(&self.ys, ranges[1].0, ranges[1].1);
        let h = |i: usize, j: usize| -> (f64, f64) {
            let t = &self.t[j * m + i];
            (t[0] - s0 * self.xs[i] - c0, t[1] - s1 * self.ys[j] - c1)
        };
        let mut out: Vec<DVector<f64>> = Vec::new();
        for j in j0..j1.max(j0 + 1).min(m - 1) {
            for i in i0..i1.max(i0 + 1).min(m - 1) {
                let corners = [h(i, j), h(i + 1, j), h(i, j + 1), h(i + 1, j + 1)];
                let straddles = |k: usize| {
                    let vals = corners.iter().map(|c| if k == 0 { c.0 } else { c.1 });
                    let (mn, mx) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                    mn <= 0.0 && mx >= 0.0
                };
                if !(straddles(0) && straddles(1)) {
                    continue;
                }
                let start = DVector::from_vec(vec![
                    0.5 * (self.xs[i] + self.xs[i + 1]),
                    0.5 * (self.ys[j] + self.ys[j + 1]),
                ]);
                if let Some(x) = newton(target, combo, start)? {
                    if !out.iter().any(|y| (y - &x).norm() <= DEDUP) {
                        out.push(x);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Pseudo-inverse Newton on the two linear branch equations.
fn newton(target: &Target, combo: &[Branch], mut x: DVector<f64>) -> Result<Option<DVector<f64>>> {
    let slopes = DVector::from_fn(x.len(), |i, _| match combo[i] {
        Branch::Linear { slope, .. } => slope,
        Branch::Fixed { .. } => 0.0,
    });
    for _ in 0..60 {
        let r = combo_residual(target, combo, &x)?;
        if r.amax() <= 1e-13 * (1.0 + x.amax()) {
            return Ok(Some(x));
        }
        let mut jac = target.jacobian(&x)?;
        for i in 0..x.len() {
            jac[(i, i)] -= slopes[i];
        }
        let svd = jac.svd(true, true);
        let tol = 1e-12 * svd.singular_values.max().max(1.0);
        let step = match svd.solve(&r, tol) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        x -= step;
        if !x.iter().all(|v| v.is_finite()) {
            return Ok(None);
        }
    }
    let r = combo_residual(target, combo, &x)?;
    Ok((r.amax() <= 1e-10 * (1.0 + x.amax())).then_some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::SmoothLoss;
    use crate::penalties::Penalty;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn shifted_quadratic(center: &[f64], penalty: Penalty) -> ProblemSpec {
        let n = center.len();
        ProblemSpec::new(SmoothLoss::quadratic(DMatrix::identity(n, n), -v(center)), penalty).unwrap()
    }

    #[test]
    fn prox_oracle_examples() {
        let l1 = ScalarPenalty::L1 { lambda: 1.0 };
        let got = brute_force_prox(&l1, 3.0, 1.0, Some(10.0), 1e-5).unwrap();
        assert_eq!(got.len(), 1);
        assert!((got[0] - 2.0).abs() <= 1e-5);
        let neg = ScalarPenalty::NegAbs { lambda: 1.0 };
        let got = brute_force_prox(&neg, 0.0, 1.0, Some(10.0), 1e-4).unwrap();
        assert_eq!(got.len(), 2);
        assert!((got[0] + 1.0).abs() < 1e-6 && (got[1] - 1.0).abs() < 1e-6);
        let got = brute_force_prox(&ScalarPenalty::Zero, 7.0, 0.5, Some(3.0), 1e-4).unwrap();
        assert!((got[0] - 7.0).abs() < 1e-8);
    }

    #[test]
    fn prox_window_expands_once() {
        let b = ScalarPenalty::Box { lower: 30.0, upper: 40.0 };
        let got = brute_force_prox(&b, 0.0, 1.0, Some(20.0), 1e-3).unwrap();
        assert!((got[0] - 30.0).abs() < 1e-8);
        let far = ScalarPenalty::Box { lower: 3000.0, upper: 4000.0 };
        assert!(matches!(brute_force_prox(&far, 0.0, 1.0, Some(20.0), 1e-2), Err(Error::OracleWindow(_))));
    }

    #[test]
    fn stationary_set_of_shifted_lasso() {
        let prob = shifted_quadratic(&[4.0, 0.0], Penalty::l1(2, 1.0));
        let set = brute_force_stationary_set(&prob, &Bounds::uniform(2, -10.0, 10.0), 400).unwrap();
        assert_eq!(set.points.len(), 1);
        assert!((&set.points[0] - v(&[3.0, 0.0])).amax() < 1e-8);
    }

    #[test]
    fn stationary_set_without_penalty() {
        let prob = shifted_quadratic(&[0.0, 0.0], Penalty::zero(2));
        let set = brute_force_stationary_set(&prob, &Bounds::uniform(2, -1.0, 1.3), 100).unwrap();
        assert_eq!(set.points.len(), 1);
        assert!(set.points[0].amax() < 1e-10);
    }

    #[test]
    fn scad_multi_well_in_one_dimension() {
        // f = ½(x − c)² with λ=1, a=3: branch-wise closed forms
        let c = 1.5;
        let prob = shifted_quadratic(&[c], Penalty::scad(1, 1.0, 3.0));
        let set = brute_force_stationary_set(&prob, &Bounds::uniform(1, -10.0, 10.0), 400).unwrap();
        // x − c + φ'(x) = 0: on (0, λ]: x = c − λ = 0.5; on (λ, aλ]: x − c + (3 − x)/2 = 0 ⇒ x = 2c − 3 = 0 ∉ (1, 3]
        assert_eq!(set.points.len(), 1);
        assert!((set.points[0][0] - 0.5).abs() < 1e-10);
        let c = 2.5;
        let prob = shifted_quadratic(&[c], Penalty::scad(1, 1.0, 3.0));
        let set = brute_force_stationary_set(&prob, &Bounds::uniform(1, -10.0, 10.0), 400).unwrap();
        // slanted branch root 2c − 3 = 2 and flat branch root x = c = 2.5 ∉ (3, ∞)
        let xs: Vec<f64> = set.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs.len(), 1, "{xs:?}");
        assert!((xs[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn negabs_proximal_versus_limiting() {
        // f = ½(x − 1)²: f'(0) = −1 and −f'(0) = 1 ∈ ∂g(0) = {±1}
        let prob = shifted_quadratic(&[1.0], Penalty::negabs(1, 1.0));
        let b = Bounds::uniform(1, -5.0, 5.0);
        let prox = brute_force_stationary_set(&prob, &b, 400).unwrap();
        let lim = brute_force_limiting_set(&prob, &b, 400).unwrap();
        assert_eq!(prox.points, vec![v(&[2.0])]);
        assert_eq!(lim.points.len(), 2);
        assert!(lim.points.iter().any(|p| p[0].abs() < 1e-12));
    }

    #[test]
    fn s_cano_affine_solve_and_empty_range() {
        let prob = shifted_quadratic(&[1.0], Penalty::zero(1));
        let b = Bounds::uniform(1, -3.0, 3.0);
        let sol = brute_force_set_valued_solve(&prob, SetValuedMap::SCano, &v(&[0.25]), &b, 400).unwrap();
        assert_eq!(sol.points.len(), 1);
        assert!((sol.points[0][0] - 1.25).abs() < 1e-12);
        let none = brute_force_set_valued_solve(&prob, SetValuedMap::SCano, &v(&[10.0]), &b, 400).unwrap();
        assert!(none.points.is_empty());
    }

    #[test]
    fn box_minimiser_in_two_dimensions() {
        let f = |x: &DVector<f64>| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).abs();
        let (mins, best, edge) = minimize_box(&f, &Bounds::uniform(2, -2.0, 2.0), 200).unwrap();
        assert!(!edge);
        assert_eq!(mins.len(), 1);
        assert!((&mins[0] - v(&[0.3, -0.7])).amax() < 1e-9);
        assert!(best.abs() < 1e-12);
    }
}
