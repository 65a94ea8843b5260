//! Polyline graphs in the plane and exact tangent / normal cone calculus on them.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for deciding that a point lies on a graph.
pub const ON_GRAPH_TOL: f64 = 1e-10;
/// Angular tolerance of canonical cone comparisons.
pub const ANGLE_TOL: f64 = 1e-10;
/// Angular tolerance for matching a direction against a graph piece.
pub const DIRECTION_TOL: f64 = 1e-8;

pub type P2 = [f64; 2];

fn norm(v: P2) -> f64 {
    v[0].hypot(v[1])
}

fn unit(v: P2) -> P2 {
    let n = norm(v);
    assert!(n > 0.0, "zero direction");
    [v[0] / n, v[1] / n]
}

fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Counter-clockwise rotation by π/2.
pub fn perp(v: P2) -> P2 {
    [-v[1], v[0]]
}

fn angle_of(v: P2) -> f64 {
    wrap(v[1].atan2(v[0]))
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU - ANGLE_TOL * 1e-3 {
        0.0
    } else {
        r
    }
}

fn dir_of(a: f64) -> P2 {
    [a.cos(), a.sin()]
}

/// A closed segment, or a ray when `length` is `None`. A ray may exclude its
/// start point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub start: P2,
    /// Unit direction.
    pub dir: P2,
    pub length: Option<f64>,
    pub open_start: bool,
}

impl Piece {
    pub fn segment(a: P2, b: P2) -> Self {
        let d = [b[0] - a[0], b[1] - a[1]];
        Piece { start: a, dir: unit(d), length: Some(norm(d)), open_start: false }
    }

    pub fn ray(start: P2, dir: P2) -> Self {
        Piece { start, dir: unit(dir), length: None, open_start: false }
    }

    pub fn open_ray(start: P2, dir: P2) -> Self {
        Piece { open_start: true, ..Self::ray(start, dir) }
    }

    pub fn end(&self) -> Option<P2> {
        self.length.map(|l| self.at(l))
    }

    pub fn at(&self, t: f64) -> P2 {
        [self.start[0] + t * self.dir[0], self.start[1] + t * self.dir[1]]
    }

    pub fn is_vertical(&self) -> bool {
        self.dir[0].abs() <= ON_GRAPH_TOL
    }

    /// Parameter of the closest point and its distance to `p`.
    fn project(&self, p: P2) -> (f64, f64) {
        let t = dot([p[0] - self.start[0], p[1] - self.start[1]], self.dir);
        let t = t.clamp(0.0, self.length.unwrap_or(f64::INFINITY));
        let q = self.at(t);
        (t, norm([p[0] - q[0], p[1] - q[1]]))
    }
}

/// Location of a point on a [`PolylineGraph`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PointClass {
    SegmentInterior { piece: usize, point: P2 },
    /// `incident` lists each piece meeting the vertex with its outgoing unit direction.
    Vertex { point: P2, incident: Vec<(usize, P2)> },
}

impl PointClass {
    pub fn point(&self) -> P2 {
        match self {
            PointClass::SegmentInterior { point, .. } | PointClass::Vertex { point, .. } => *point,
        }
    }
}

/// Finite union of segments and rays in the plane, e.g. `gph ∂^πφ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolylineGraph {
    pieces: Vec<Piece>,
}

impl PolylineGraph {
    pub fn new(pieces: Vec<Piece>) -> Self {
        PolylineGraph { pieces }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_closed(&self) -> bool {
        self.pieces.iter().all(|p| !p.open_start)
    }

    pub fn closure(&self) -> Self {
        PolylineGraph { pieces: self.pieces.iter().map(|p| Piece { open_start: false, ..*p }).collect() }
    }

    /// Every finite endpoint, deduplicated.
    pub fn vertices(&self) -> Vec<P2> {
        let mut out: Vec<P2> = Vec::new();
        for piece in &self.pieces {
            for v in std::iter::once(piece.start).chain(piece.end()) {
                if !out.iter().any(|w| norm([w[0] - v[0], w[1] - v[1]]) <= ON_GRAPH_TOL) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Vertical slice `{y : (x, y) ∈ G}` as closed intervals; open ray
    /// starts are dropped.
    pub fn slice(&self, x: f64) -> crate::interval::IntervalSet {
        let mut out = crate::interval::IntervalSet::empty();
        for piece in &self.pieces {
            if piece.is_vertical() {
                if (piece.start[0] - x).abs() <= ON_GRAPH_TOL {
                    let a = piece.start[1];
                    let b = match piece.length {
                        Some(l) => piece.at(l)[1],
                        None => piece.dir[1].signum() * f64::INFINITY,
                    };
                    out = out.union(&crate::interval::IntervalSet::closed(a.min(b), a.max(b)));
                }
                continue;
            }
            let t = (x - piece.start[0]) / piece.dir[0];
            let max_t = piece.length.unwrap_or(f64::INFINITY);
            let at_start = t.abs() <= ON_GRAPH_TOL;
            if (t >= 0.0 || at_start) && t <= max_t + ON_GRAPH_TOL && !(at_start && piece.open_start) {
                out = out.union(&crate::interval::IntervalSet::point(piece.at(t.clamp(0.0, max_t))[1]));
            }
        }
        out
    }

    /// Locate `p` on the graph and snap it to the exact vertex when it sits at one.
    pub fn classify_point(&self, p: P2) -> Result<PointClass> {
        let mut vertex: Option<P2> = None;
        let mut interior: Option<(usize, P2)> = None;
        for (i, piece) in self.pieces.iter().enumerate() {
            let (t, d) = piece.project(p);
            if d > ON_GRAPH_TOL {
                continue;
            }
            let near_start = t <= ON_GRAPH_TOL;
            let near_end = piece.length.is_some_and(|l| l - t <= ON_GRAPH_TOL);
            if near_start && piece.open_start {
                continue;
            }
            if near_start {
                vertex = Some(piece.start);
            } else if near_end {
                vertex = piece.end();
            } else if interior.is_none() {
                interior = Some((i, piece.at(t)));
            }
        }
        if let Some(v) = vertex {
            let mut incident = Vec::new();
            for (i, piece) in self.pieces.iter().enumerate() {
                if norm([piece.start[0] - v[0], piece.start[1] - v[1]]) <= ON_GRAPH_TOL {
                    incident.push((i, piece.dir));
                }
                if let Some(e) = piece.end() {
                    if norm([e[0] - v[0], e[1] - v[1]]) <= ON_GRAPH_TOL {
                        incident.push((i, [-piece.dir[0], -piece.dir[1]]));
                    }
                }
            }
            return Ok(PointClass::Vertex { point: v, incident });
        }
        match interior {
            Some((piece, point)) => Ok(PointClass::SegmentInterior { piece, point }),
            None => Err(Error::PointNotOnGraph),
        }
    }

    /// Tangent (contingent) cone at `p`.
    pub fn tangent_cone(&self, p: P2) -> Result<ConeUnion2> {
        Ok(match self.classify_point(p)? {
            PointClass::SegmentInterior { piece, .. } => ConeUnion2::line(self.pieces[piece].dir),
            PointClass::Vertex { incident, .. } => {
                ConeUnion2::union_all(incident.iter().map(|(_, d)| ConeUnion2::ray(*d)))
            }
        })
    }

    /// Regular (Fréchet) normal cone at `p`: the polar of the tangent cone.
    pub fn regular_normal_cone(&self, p: P2) -> Result<ConeUnion2> {
        Ok(match self.classify_point(p)? {
            PointClass::SegmentInterior { piece, .. } => ConeUnion2::line(perp(self.pieces[piece].dir)),
            PointClass::Vertex { .. } => self.tangent_cone(p)?.polar(),
        })
    }

    /// Limiting (Mordukhovich) normal cone at `p`.
    pub fn limiting_normal_cone(&self, p: P2) -> Result<ConeUnion2> {
        Ok(match self.classify_point(p)? {
            PointClass::SegmentInterior { piece, .. } => ConeUnion2::line(perp(self.pieces[piece].dir)),
            PointClass::Vertex { ref incident, .. } => {
                let lines = incident.iter().map(|(_, d)| ConeUnion2::line(perp(*d)));
                ConeUnion2::union_all(lines).union(&self.regular_normal_cone(p)?)
            }
        })
    }

    /// Directional limiting normal cone at `p` in direction `d`.
    pub fn directional_normal_cone(&self, p: P2, d: P2) -> Result<ConeUnion2> {
        let class = self.classify_point(p)?;
        if norm(d) == 0.0 {
            return self.limiting_normal_cone(p);
        }
        let du = unit(d);
        let along = |dir: P2| norm([dir[0] - du[0], dir[1] - du[1]]) <= DIRECTION_TOL;
        Ok(match class {
            PointClass::SegmentInterior { piece, .. } => {
                let dir = self.pieces[piece].dir;
                if along(dir) || along([-dir[0], -dir[1]]) {
                    ConeUnion2::line(perp(dir))
                } else {
                    ConeUnion2::zero()
                }
            }
            PointClass::Vertex { incident, .. } => ConeUnion2::union_all(
                incident.iter().filter(|(_, dir)| along(*dir)).map(|(_, dir)| ConeUnion2::line(perp(*dir))),
            ),
        })
    }
}

/// A closed circular arc of directions: angles `start .. start + len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

/// One convex piece of a planar cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ConeAtom {
    ZeroOnly,
    Ray { generator: P2 },
    Line { generator: P2 },
    /// Counter-clockwise from `g1` to `g2`, opening angle below π.
    Sector { g1: P2, g2: P2 },
    HalfPlane { normal: P2 },
    FullPlane,
}

impl ConeAtom {
    pub fn to_cone(&self) -> ConeUnion2 {
        match *self {
            ConeAtom::ZeroOnly => ConeUnion2::zero(),
            ConeAtom::Ray { generator } => ConeUnion2::ray(generator),
            ConeAtom::Line { generator } => ConeUnion2::line(generator),
            ConeAtom::Sector { g1, g2 } => ConeUnion2::sector(g1, g2),
            ConeAtom::HalfPlane { normal } => ConeUnion2::half_plane(normal),
            ConeAtom::FullPlane => ConeUnion2::full(),
        }
    }
}

/// A closed cone in `ℝ²` that is a finite union of polyhedral cones, kept in
/// canonical form as sorted, merged arcs of directions. No arcs means `{0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeUnion2 {
    arcs: Vec<Arc>,
}

impl ConeUnion2 {
    pub fn zero() -> Self {
        ConeUnion2 { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        ConeUnion2 { arcs: vec![Arc { start: 0.0, len: TAU }] }
    }

    pub fn ray(g: P2) -> Self {
        Self::from_arcs(vec![Arc { start: angle_of(g), len: 0.0 }])
    }

    pub fn line(g: P2) -> Self {
        Self::ray(g).union(&Self::ray([-g[0], -g[1]]))
    }

    /// Counter-clockwise sector from `g1` to `g2`.
    pub fn sector(g1: P2, g2: P2) -> Self {
        let a = angle_of(g1);
        Self::from_arcs(vec![Arc { start: a, len: wrap(angle_of(g2) - a) }])
    }

    /// `{v : ⟨normal, v⟩ ≥ 0}`.
    pub fn half_plane(normal: P2) -> Self {
        Self::from_arcs(vec![Arc { start: wrap(angle_of(normal) - PI / 2.0), len: PI }])
    }

    pub fn from_arcs(arcs: Vec<Arc>) -> Self {
        let mut c = ConeUnion2 { arcs };
        c.normalize();
        c
    }

    pub fn union_all(items: impl IntoIterator<Item = ConeUnion2>) -> Self {
        Self::from_arcs(items.into_iter().flat_map(|c| c.arcs).collect())
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_zero(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].len >= TAU - ANGLE_TOL
    }

    fn normalize(&mut self) {
        if self.arcs.iter().any(|a| a.len >= TAU - ANGLE_TOL) {
            self.arcs = vec![Arc { start: 0.0, len: TAU }];
            return;
        }
        let mut arcs: Vec<Arc> = self.arcs.iter().map(|a| Arc { start: wrap(a.start), len: a.len.max(0.0) }).collect();
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut merged: Vec<Arc> = Vec::with_capacity(arcs.len());
        for a in arcs {
            match merged.last_mut() {
                Some(last) if a.start <= last.start + last.len + ANGLE_TOL => {
                    last.len = last.len.max(a.start + a.len - last.start);
                }
                _ => merged.push(a),
            }
        }
        // arcs crossing angle 0 absorb the leading ones
        while merged.len() > 1 {
            let last = *merged.last().unwrap();
            let first = merged[0];
            if last.start + last.len + ANGLE_TOL < TAU + first.start {
                break;
            }
            let len = last.len.max(TAU + first.start + first.len - last.start);
            merged.remove(0);
            *merged.last_mut().unwrap() = Arc { start: last.start, len };
        }
        if merged.iter().any(|a| a.len >= TAU - ANGLE_TOL) {
            merged = vec![Arc { start: 0.0, len: TAU }];
        }
        self.arcs = merged;
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_arcs(self.arcs.iter().chain(&other.arcs).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.arcs {
            for b in &other.arcs {
                out.extend(arc_intersection(*a, *b));
            }
        }
        Self::from_arcs(out)
    }

    /// Polar cone `{v : ⟨v, c⟩ ≤ 0 for all c in the cone}`.
    pub fn polar(&self) -> Self {
        if self.is_full() {
            return Self::zero();
        }
        let mut out = Self::full();
        for a in &self.arcs {
            let mut gens = vec![dir_of(a.start), dir_of(a.start + a.len)];
            if a.len >= PI - ANGLE_TOL {
                gens.push(dir_of(a.start + a.len / 2.0));
            }
            for g in gens {
                out = out.intersection(&Self::half_plane([-g[0], -g[1]]));
            }
        }
        out
    }

    pub fn contains(&self, v: P2) -> bool {
        self.contains_with(v, ANGLE_TOL)
    }

    pub fn contains_with(&self, v: P2, tol: f64) -> bool {
        if norm(v) == 0.0 {
            return true;
        }
        let t = angle_of(v);
        self.arcs.iter().any(|a| {
            let off = (t - a.start).rem_euclid(TAU);
            off <= a.len + tol || off >= TAU - tol
        })
    }

    /// `self ⊆ other` up to angular tolerance `tol`.
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        self.arcs.iter().all(|a| {
            other.arcs.iter().any(|b| {
                let mut off = (a.start - b.start).rem_euclid(TAU);
                if off >= TAU - tol {
                    off -= TAU;
                }
                off + a.len <= b.len + tol
            })
        })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.is_subset_of(other, tol) && other.is_subset_of(self, tol)
    }

    /// Decomposition into convex atoms.
    pub fn atoms(&self) -> Vec<ConeAtom> {
        if self.arcs.is_empty() {
            return vec![ConeAtom::ZeroOnly];
        }
        if self.is_full() {
            return vec![ConeAtom::FullPlane];
        }
        let mut atoms = Vec::new();
        let mut rays: Vec<P2> = Vec::new();
        for a in &self.arcs {
            if a.len <= ANGLE_TOL {
                rays.push(dir_of(a.start));
            } else if a.len < PI - ANGLE_TOL {
                atoms.push(ConeAtom::Sector { g1: dir_of(a.start), g2: dir_of(a.start + a.len) });
            } else if a.len <= PI + ANGLE_TOL {
                atoms.push(ConeAtom::HalfPlane { normal: dir_of(a.start + PI / 2.0) });
            } else {
                atoms.push(ConeAtom::HalfPlane { normal: dir_of(a.start + PI / 2.0) });
                atoms.push(ConeAtom::Sector { g1: dir_of(a.start + PI), g2: dir_of(a.start + a.len) });
            }
        }
        let mut used = vec![false; rays.len()];
        for i in 0..rays.len() {
            if used[i] {
                continue;
            }
            let partner = (i + 1..rays.len()).find(|&j| !used[j] && dot(rays[i], rays[j]) <= -1.0 + 1e-12);
            match partner {
                Some(j) => {
                    used[j] = true;
                    atoms.push(ConeAtom::Line { generator: rays[i] });
                }
                None => atoms.push(ConeAtom::Ray { generator: rays[i] }),
            }
        }
        atoms
    }

    /// JSON atom list for debugging output.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.atoms()).expect("atoms serialize")
    }
}

fn arc_intersection(a: Arc, b: Arc) -> Vec<Arc> {
    if a.len >= TAU - ANGLE_TOL {
        return vec![b];
    }
    if b.len >= TAU - ANGLE_TOL {
        return vec![a];
    }
    let mut out = Vec::new();
    // b relative to a's start, and b shifted back one turn
    let d = (b.start - a.start).rem_euclid(TAU);
    for shift in [d, d - TAU] {
        let lo = shift.max(0.0);
        let hi = (shift + b.len).min(a.len);
        if hi >= lo - ANGLE_TOL {
            out.push(Arc { start: a.start + lo, len: (hi - lo).max(0.0) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalties::ScalarPenalty;

    const TOL: f64 = 1e-10;

    fn scad() -> PolylineGraph {
        ScalarPenalty::Scad { lambda: 1.0, a: 3.0 }.graph()
    }

    #[test]
    fn classify_examples() {
        let g = scad();
        assert!(matches!(g.classify_point([0.0, 0.3]).unwrap(), PointClass::SegmentInterior { piece: 3, .. }));
        match g.classify_point([0.0, 1.0]).unwrap() {
            PointClass::Vertex { incident, .. } => {
                let ids: Vec<usize> = incident.iter().map(|(i, _)| *i).collect();
                assert_eq!(ids, vec![3, 4]);
            }
            other => panic!("expected vertex, got {other:?}"),
        }
        assert!(matches!(g.classify_point([5.0, 0.0]).unwrap(), PointClass::SegmentInterior { piece: 6, .. }));
        assert_eq!(g.classify_point([5.0, 1.0]).unwrap_err(), Error::PointNotOnGraph);
    }

    #[test]
    fn interior_cones() {
        let g = scad();
        assert!(g.tangent_cone([0.0, 0.3]).unwrap().approx_eq(&ConeUnion2::line([0.0, 1.0]), TOL));
        // slanted piece λ < z < aλ
        let z = 2.0;
        let p = [z, (3.0 - z) / 2.0];
        assert!(g.tangent_cone(p).unwrap().approx_eq(&ConeUnion2::line([1.0, -0.5]), TOL));
        assert!(g.regular_normal_cone(p).unwrap().approx_eq(&ConeUnion2::line([1.0, 2.0]), TOL));
        assert!(g.limiting_normal_cone([0.0, 0.3]).unwrap().approx_eq(&ConeUnion2::line([1.0, 0.0]), TOL));
        assert!(g.limiting_normal_cone([0.5, 1.0]).unwrap().approx_eq(&ConeUnion2::line([0.0, 1.0]), TOL));
        let dn = g.directional_normal_cone(p, [1.0, -0.5]).unwrap();
        assert!(dn.approx_eq(&ConeUnion2::line([1.0, 2.0]), TOL));
        assert!(g.directional_normal_cone(p, [1.0, 1.0]).unwrap().is_zero());
    }

    #[test]
    fn kink_cones_of_l1() {
        let g = ScalarPenalty::L1 { lambda: 1.0 }.graph();
        let t = g.tangent_cone([0.0, 1.0]).unwrap();
        let expect = ConeUnion2::ray([0.0, -1.0]).union(&ConeUnion2::ray([1.0, 0.0]));
        assert!(t.approx_eq(&expect, TOL));
        let reg = g.regular_normal_cone([0.0, 1.0]).unwrap();
        assert!(reg.approx_eq(&ConeUnion2::sector([0.0, 1.0], [-1.0, 0.0]), TOL));
        let lim = g.limiting_normal_cone([0.0, 1.0]).unwrap();
        let expect = ConeUnion2::line([1.0, 0.0]).union(&ConeUnion2::line([0.0, 1.0])).union(&reg);
        assert!(lim.approx_eq(&expect, TOL));
        // d along the vertical piece
        let dn = scad().directional_normal_cone([0.0, -1.0], [0.0, 1.0]).unwrap();
        assert!(dn.approx_eq(&ConeUnion2::line([1.0, 0.0]), TOL));
    }

    #[test]
    fn arcs_merge_and_wrap() {
        let c = ConeUnion2::sector([1.0, -1.0], [1.0, 1.0]);
        assert_eq!(c.arcs().len(), 1);
        assert!(c.contains([1.0, 0.0]));
        assert!(!c.contains([-1.0, 0.0]));
        let h = ConeUnion2::half_plane([0.0, 1.0]).union(&ConeUnion2::half_plane([0.0, -1.0]));
        assert!(h.is_full());
        assert!(ConeUnion2::full().polar().is_zero());
        assert!(ConeUnion2::zero().polar().is_full());
    }

    #[test]
    fn polar_examples() {
        let h = ConeUnion2::half_plane([0.0, 1.0]);
        assert!(h.polar().approx_eq(&ConeUnion2::ray([0.0, -1.0]), TOL));
        let l = ConeUnion2::line([1.0, 0.0]);
        assert!(l.polar().approx_eq(&ConeUnion2::line([0.0, 1.0]), TOL));
        let q = ConeUnion2::sector([1.0, 0.0], [0.0, 1.0]);
        assert!(q.polar().approx_eq(&ConeUnion2::sector([-1.0, 0.0], [0.0, -1.0]), TOL));
        let big = ConeUnion2::sector([1.0, 0.0], [0.0, -1.0]);
        assert!(big.polar().is_zero());
    }

    #[test]
    fn atoms_round_trip() {
        let cones = [
            ConeUnion2::zero(),
            ConeUnion2::line([1.0, 2.0]),
            ConeUnion2::ray([0.0, -1.0]).union(&ConeUnion2::ray([1.0, 0.0])),
            ConeUnion2::sector([1.0, 0.0], [0.0, 1.0]).union(&ConeUnion2::line([1.0, -1.0])),
            ConeUnion2::sector([1.0, 0.0], [0.0, -1.0]),
            ConeUnion2::half_plane([1.0, 1.0]),
            ConeUnion2::full(),
        ];
        for c in cones {
            let back = ConeUnion2::union_all(c.atoms().iter().map(ConeAtom::to_cone));
            assert!(back.approx_eq(&c, TOL), "{c:?}");
        }
        assert!(matches!(ConeUnion2::line([0.0, 1.0]).atoms()[..], [ConeAtom::Line { .. }]));
    }

    #[test]
    fn negabs_graph_is_not_closed() {
        let g = ScalarPenalty::NegAbs { lambda: 1.0 }.graph();
        assert!(!g.is_closed());
        assert_eq!(g.classify_point([0.0, 1.0]).unwrap_err(), Error::PointNotOnGraph);
        assert!(g.closure().classify_point([0.0, 1.0]).is_ok());
        assert!(g.slice(0.0).is_empty());
    }
}
