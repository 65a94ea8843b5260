//! Iterate traces and their CSV form.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Iterates `x^k` with `F(x^k)`, perturbations `p_k = x^{k−1} − x^k` and
/// residuals `r(x^k)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterateTrace {
    pub points: Vec<DVector<f64>>,
    pub objectives: Vec<f64>,
    /// `None` at `k = 0`.
    pub perturbations: Vec<Option<DVector<f64>>>,
    pub residuals: Vec<f64>,
}

impl IterateTrace {
    pub fn new(x0: DVector<f64>, f0: f64) -> Self {
        IterateTrace { points: vec![x0], objectives: vec![f0], perturbations: vec![None], residuals: vec![f64::NAN] }
    }

    /// Append `x^{k+1}`; the perturbation is computed from the stored points.
    pub fn push(&mut self, x: DVector<f64>, f: f64) {
        let prev = self.points.last().expect("trace is never empty");
        self.perturbations.push(Some(prev - &x));
        self.points.push(x);
        self.objectives.push(f);
        self.residuals.push(f64::NAN);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |x| x.len())
    }

    pub fn last(&self) -> &DVector<f64> {
        self.points.last().expect("trace is never empty")
    }

    pub fn pnorm(&self, k: usize) -> Option<f64> {
        self.perturbations[k].as_ref().map(|p| p.norm())
    }

    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("k");
        for i in 0..n {
            write!(out, ",x_{i}").unwrap();
        }
        out.push_str(",F,pnorm,residual\n");
        for k in 0..self.len() {
            write!(out, "{k}").unwrap();
            for v in self.points[k].iter() {
                write!(out, ",{}", fmt_f64(*v)).unwrap();
            }
            write!(out, ",{}", fmt_f64(self.objectives[k])).unwrap();
            match self.pnorm(k) {
                Some(p) => write!(out, ",{}", fmt_f64(p)).unwrap(),
                None => out.push(','),
            }
            writeln!(out, ",{}", fmt_f64(self.residuals[k])).unwrap();
        }
        out
    }

    /// Parse the CSV written by [`IterateTrace::to_csv`]. Perturbations are
    /// rebuilt from consecutive points.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty trace file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 4 || cols[0] != "k" || cols[cols.len() - 3..] != ["F", "pnorm", "residual"] {
            return Err(Error::Parse(format!("unexpected trace header: {header}")));
        }
        let n = cols.len() - 4;
        let mut trace = IterateTrace::default();
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse(format!("row {row}: expected {} fields, got {}", cols.len(), fields.len())));
            }
            let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| Error::Parse(format!("row {row}: {e}"))) };
            let x = DVector::from_iterator(n, fields[1..=n].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?);
            let f = num(fields[n + 1])?;
            let r = num(fields[n + 3])?;
            if trace.points.is_empty() {
                trace = IterateTrace::new(x, f);
            } else {
                trace.push(x, f);
            }
            *trace.residuals.last_mut().unwrap() = r;
        }
        if trace.points.is_empty() {
            return Err(Error::Parse("trace has no rows".into()));
        }
        Ok(trace)
    }
}

/// 17 significant digits; round-trips every finite double.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let t = IterateTrace::new(DVector::from_vec(vec![1.0, 2.0]), 0.5);
        assert!(t.to_csv().starts_with("k,x_0,x_1,F,pnorm,residual\n"));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 1..20)) {
            let mut t = IterateTrace::new(DVector::from_vec(rows[0].clone()), rows[0][0]);
            for r in &rows[1..] {
                t.push(DVector::from_vec(r.clone()), r[1] * 0.1);
            }
            for (k, r) in t.residuals.iter_mut().enumerate() {
                *r = k as f64 / 3.0;
            }
            let back = IterateTrace::from_csv(&t.to_csv()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
