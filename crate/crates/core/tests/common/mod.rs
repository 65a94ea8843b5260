//! Definition-based sampling oracle for cones of a scalar penalty's
//! subdifferential graph. Graph points come from `prox_subdiff` slices only,
//! never from the polyline representation under test.

#![allow(dead_code)]

use calmkit::{ConeUnion2, ScalarPenalty};

pub type P2 = [f64; 2];

const STEPS: usize = 60;

fn norm(v: P2) -> f64 {
    v[0].hypot(v[1])
}

fn unit(v: P2) -> P2 {
    let n = norm(v);
    [v[0] / n, v[1] / n]
}

fn angle_between(a: P2, b: P2) -> f64 {
    let c = (a[0] * b[0] + a[1] * b[1]) / (norm(a) * norm(b));
    c.clamp(-1.0, 1.0).acos()
}

/// Points `(x, v)` with `v ∈ ∂^πφ(x)` in the square of half-width `r` about `p`.
pub fn graph_samples(phi: &ScalarPenalty, p: P2, r: f64) -> Vec<P2> {
    let mut xs: Vec<f64> = (0..=2 * STEPS).map(|j| p[0] - r + r * j as f64 / STEPS as f64).collect();
    xs.push(p[0]);
    let mut out = Vec::new();
    for x in xs {
        for &(lo, hi) in phi.prox_subdiff(x).intervals() {
            let lo = lo.max(p[1] - r);
            let hi = hi.min(p[1] + r);
            if lo > hi {
                continue;
            }
            if lo == hi {
                out.push([x, lo]);
                continue;
            }
            for j in 0..=STEPS {
                out.push([x, lo + (hi - lo) * j as f64 / STEPS as f64]);
            }
            if p[1] >= lo && p[1] <= hi {
                out.push([x, p[1]]);
            }
        }
    }
    out
}

/// Unit directions from `p` to nearby graph points.
pub fn tangent_directions(phi: &ScalarPenalty, p: P2, r: f64) -> Vec<P2> {
    let mut dirs: Vec<P2> = Vec::new();
    for q in graph_samples(phi, p, r) {
        let d = [q[0] - p[0], q[1] - p[1]];
        if norm(d) > 1e-3 * r {
            let u = unit(d);
            if !dirs.iter().any(|w| angle_between(*w, u) < 1e-9) {
                dirs.push(u);
            }
        }
    }
    dirs
}

/// Candidate unit vectors for membership comparisons: a fine angular grid
/// plus the axis and `±perp` directions of every sampled tangent.
pub fn candidates(extra: &[P2]) -> Vec<P2> {
    let mut out: Vec<P2> = (0..360).map(|k| {
        let t = std::f64::consts::TAU * k as f64 / 360.0 + 1e-3;
        [t.cos(), t.sin()]
    }).collect();
    for d in extra {
        out.push(*d);
        out.push([-d[1], d[0]]);
        out.push([d[1], -d[0]]);
        out.push([-d[0], -d[1]]);
    }
    out
}

/// `v ∈ (cone generated by dirs)°`.
pub fn in_polar(dirs: &[P2], v: P2, tol: f64) -> bool {
    dirs.iter().all(|d| d[0] * v[0] + d[1] * v[1] <= tol)
}

/// `v ∈ cone(dirs)` for a union of rays (polylines have no 2-D tangent sectors
/// except at vertices, where the cone is a union of rays).
pub fn in_ray_union(dirs: &[P2], v: P2, tol: f64) -> bool {
    norm(v) == 0.0 || dirs.iter().any(|d| angle_between(*d, v) <= tol)
}

/// Regular normal cone at `q` as the polar of its sampled tangents.
pub fn regular_normal_oracle(phi: &ScalarPenalty, q: P2, r: f64) -> impl Fn(P2) -> bool {
    let dirs = tangent_directions(phi, q, r);
    move |v| in_polar(&dirs, unit(v), 1e-9)
}

/// Tangent sets of the graph points near `p` accepted by `keep`, deduplicated.
fn nearby_tangent_sets(phi: &ScalarPenalty, p: P2, r: f64, keep: impl Fn(P2) -> bool) -> Vec<Vec<P2>> {
    let mut sets: Vec<Vec<P2>> = Vec::new();
    for q in graph_samples(phi, p, r) {
        let d = [q[0] - p[0], q[1] - p[1]];
        if norm(d) <= 1e-3 * r || !keep(d) {
            continue;
        }
        let dirs = tangent_directions(phi, q, norm(d) / 10.0);
        let same = |a: &Vec<P2>| a.len() == dirs.len() && a.iter().all(|u| dirs.iter().any(|w| angle_between(*u, *w) < 1e-9));
        if !sets.iter().any(same) {
            sets.push(dirs);
        }
    }
    sets
}

/// Limiting normal cone: union of regular normals at `p` and at graph points
/// approaching `p`.
pub fn limiting_normal_oracle(phi: &ScalarPenalty, p: P2, r: f64) -> impl Fn(P2) -> bool {
    let mut sets = nearby_tangent_sets(phi, p, r, |_| true);
    sets.push(tangent_directions(phi, p, r));
    move |v| sets.iter().any(|dirs| in_polar(dirs, unit(v), 1e-9))
}

/// Directional normal cone along `dir`: regular normals at graph points
/// approaching `p` from direction `dir`; the limiting cone when `dir = 0`.
pub fn directional_normal_oracle(phi: &ScalarPenalty, p: P2, dir: P2, r: f64) -> Box<dyn Fn(P2) -> bool> {
    if norm(dir) == 0.0 {
        return Box::new(limiting_normal_oracle(phi, p, r));
    }
    let sets = nearby_tangent_sets(phi, p, r, |d| angle_between(d, dir) <= 1e-9);
    Box::new(move |v| sets.iter().any(|dirs| in_polar(dirs, unit(v), 1e-9)))
}

/// Whether `v` is within `tol` (angle) of the boundary of `cone`.
pub fn near_boundary(cone: &ConeUnion2, v: P2, tol: f64) -> bool {
    let t = v[1].atan2(v[0]);
    let gap = |a: f64| {
        let d = (t - a).rem_euclid(std::f64::consts::TAU);
        d.min(std::f64::consts::TAU - d)
    };
    cone.arcs().iter().any(|arc| gap(arc.start) <= tol || gap(arc.start + arc.len) <= tol)
}

/// Compares an analytic cone with an oracle membership predicate on the
/// candidate set, ignoring candidates within `tol` of the analytic boundary.
/// Returns the first disagreement.
pub fn compare(cone: &ConeUnion2, oracle: impl Fn(P2) -> bool, cands: &[P2], tol: f64) -> Option<P2> {
    for &v in cands {
        if near_boundary(cone, v, tol) {
            continue;
        }
        if cone.contains_with(v, 0.0) != oracle(v) {
            return Some(v);
        }
    }
    None
}

/// Every arc endpoint of the analytic cone (each ray, each sector edge)
/// belongs to the oracle cone.
pub fn boundary_matches(cone: &ConeUnion2, oracle: impl Fn(P2) -> bool) -> bool {
    cone.arcs().iter().all(|arc| {
        [arc.start, arc.start + arc.len].iter().all(|&t| oracle([t.cos(), t.sin()]))
    })
}

/// Full agreement: interiors/exteriors on the candidate set and boundaries.
pub fn agrees(cone: &ConeUnion2, oracle: impl Fn(P2) -> bool, cands: &[P2], tol: f64) -> bool {
    compare(cone, &oracle, cands, tol).is_none() && boundary_matches(cone, &oracle)
}
