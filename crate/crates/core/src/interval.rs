use serde::{Deserialize, Serialize};

/// A finite union of closed intervals on the extended real line.
///
/// Intervals are kept sorted and pairwise disjoint. Degenerate intervals
/// represent single points; endpoints may be infinite.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn point(v: f64) -> Self {
        IntervalSet { intervals: vec![(v, v)] }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        IntervalSet { intervals: vec![(lo, hi)] }
    }

    pub fn real_line() -> Self {
        Self::closed(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn from_points(points: &[f64]) -> Self {
        let mut out = Self::empty();
        for &p in points {
            out = out.union(&Self::point(p));
        }
        out
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|(a, b)| a.is_finite() && b.is_finite())
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.distance(v) <= tol
    }

    /// Distance from `v` to the set; `+∞` for the empty set.
    pub fn distance(&self, v: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| {
                if v < a {
                    a - v
                } else if v > b {
                    v - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The point of the set nearest to `v`, if any.
    pub fn nearest(&self, v: f64) -> Option<f64> {
        self.intervals
            .iter()
            .map(|&(a, b)| v.clamp(a, b))
            .min_by(|p, q| (p - v).abs().total_cmp(&(q - v).abs()))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all: Vec<(f64, f64)> = self.intervals.iter().chain(other.intervals.iter()).copied().collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(all.len());
        for (a, b) in all {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        IntervalSet { intervals: merged }
    }

    /// Minkowski sum `{a + b : a ∈ self, b ∈ other}`.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = Self::empty();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                out = out.union(&IntervalSet { intervals: vec![(a + c, b + d)] });
            }
        }
        out
    }

    pub fn shift(&self, by: f64) -> Self {
        IntervalSet { intervals: self.intervals.iter().map(|&(a, b)| (a + by, b + by)).collect() }
    }

    /// Set equality with endpoint tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |x: f64, y: f64| x == y || (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()));
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(other.intervals.iter())
                .all(|(p, q)| close(p.0, q.0) && close(p.1, q.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_merges_overlaps() {
        let s = IntervalSet::closed(0.0, 1.0).union(&IntervalSet::closed(0.5, 2.0));
        assert_eq!(s.intervals(), &[(0.0, 2.0)]);
        let t = s.union(&IntervalSet::point(5.0));
        assert_eq!(t.intervals().len(), 2);
    }

    #[test]
    fn distance_and_nearest() {
        let s = IntervalSet::from_points(&[-1.0, 1.0]);
        assert_eq!(s.distance(0.25), 0.75);
        assert_eq!(s.nearest(0.25), Some(1.0));
        assert_eq!(IntervalSet::empty().distance(0.0), f64::INFINITY);
    }

    #[test]
    fn minkowski_sum_with_rays() {
        let s = IntervalSet::point(1.0).sum(&IntervalSet::closed(f64::NEG_INFINITY, 0.0));
        assert_eq!(s.intervals(), &[(f64::NEG_INFINITY, 1.0)]);
        assert!(s.contains(-100.0, 0.0));
    }
}
