use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StationaryMethod {
    OracleGrid,
    Analytic,
}

/// Finite approximation of the proximal stationary set `𝒳^π`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySetApprox {
    pub points: Vec<DVector<f64>>,
    /// Localization radius certified for each point.
    pub radius: f64,
    pub method: StationaryMethod,
}

impl StationarySetApprox {
    pub fn analytic(points: Vec<DVector<f64>>) -> Self {
        StationarySetApprox { points, radius: 0.0, method: StationaryMethod::Analytic }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, x: &DVector<f64>) -> Result<f64> {
        distance_to_set(x, self)
    }
}

/// Euclidean distance from `x` to the nearest stored point.
pub fn distance_to_set(x: &DVector<f64>, set: &StationarySetApprox) -> Result<f64> {
    set.points
        .iter()
        .map(|p| (p - x).norm())
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptyStationarySet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn distance_examples() {
        let origin = StationarySetApprox::analytic(vec![v(&[0.0, 0.0])]);
        assert_eq!(distance_to_set(&v(&[0.0, 0.0]), &origin).unwrap(), 0.0);
        assert_eq!(distance_to_set(&v(&[3.0, 4.0]), &origin).unwrap(), 5.0);
        let two = StationarySetApprox::analytic(vec![v(&[0.0, 0.0]), v(&[2.0, 0.0])]);
        assert_eq!(distance_to_set(&v(&[1.0, 0.0]), &two).unwrap(), 1.0);
    }

    #[test]
    fn empty_set_is_an_error() {
        let empty = StationarySetApprox::analytic(vec![]);
        let err = distance_to_set(&v(&[1.0]), &empty).unwrap_err();
        assert_eq!(err.to_string(), "empty stationary set");
    }
}
