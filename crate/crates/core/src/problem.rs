//! The composite problem `F = f + g` and solver configuration.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::losses::SmoothLoss;
use crate::penalties::Penalty;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidConfig("box needs lower <= upper".into()));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(n: usize, lo: f64, hi: f64) -> Self {
        Bounds { lower: vec![lo; n], upper: vec![hi; n] }
    }

    /// The box of half-width `radius` around `center`.
    pub fn around(center: &DVector<f64>, radius: f64) -> Self {
        Bounds {
            lower: center.iter().map(|c| c - radius).collect(),
            upper: center.iter().map(|c| c + radius).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.iter().enumerate().all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().enumerate().map(|(i, &v)| v.clamp(self.lower[i], self.upper[i])))
    }

    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        (self.project(x) - x).norm()
    }

    pub fn diameter(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| (u - l).powi(2)).sum::<f64>().sqrt()
    }
}

/// The composite objective `F(x) = f(x) + g(x)` on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub loss: SmoothLoss,
    pub penalty: Penalty,
}

impl ProblemSpec {
    pub fn new(loss: SmoothLoss, penalty: Penalty) -> Result<Self> {
        let n = loss.dim();
        check_dim(n, penalty.dim())?;
        if n == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        loss.validate()?;
        penalty.validate()?;
        Ok(ProblemSpec { n, loss, penalty })
    }

    pub fn objective(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.loss.value(x)? + self.penalty.value(x))
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.loss.gradient(x)
    }

    /// Whether `γ` lies below the penalty's prox-boundedness threshold.
    pub fn check_gamma(&self, gamma: f64) -> Result<()> {
        let threshold = self.penalty.prox_threshold();
        if !(gamma > 0.0) || gamma >= threshold {
            return Err(Error::NotProxBounded { gamma, threshold });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gamma: f64,
    pub max_iter: usize,
    /// Stop once `‖x^{k+1} − x^k‖ ≤ stop_tol`.
    pub stop_tol: f64,
    /// Lipschitz constant of `∇f`; computed from the loss when absent.
    pub lipschitz: Option<f64>,
    pub seed: u64,
    /// Refuse to run unless `γ < 1/L`.
    pub theory_mode: bool,
    /// Box for Lipschitz estimation of losses without a global bound.
    pub domain: Option<Bounds>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gamma: 0.5,
            max_iter: 1000,
            stop_tol: 1e-12,
            lipschitz: None,
            seed: 0,
            theory_mode: false,
            domain: None,
        }
    }
}

impl SolverConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        SolverConfig { gamma, ..Default::default() }
    }

    /// The user-supplied `L`, or the loss's bound over the configured domain.
    pub fn resolve_lipschitz(&self, prob: &ProblemSpec) -> Result<f64> {
        match self.lipschitz {
            Some(l) if l > 0.0 => Ok(l),
            Some(l) => Err(Error::InvalidConfig(format!("Lipschitz constant must be positive, got {l}"))),
            None => Ok(prob.loss.lipschitz_bound(self.domain.as_ref())?.value),
        }
    }

    pub fn validate(&self, prob: &ProblemSpec) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::InvalidConfig("stop_tol must be nonnegative".into()));
        }
        prob.check_gamma(self.gamma)?;
        if self.theory_mode {
            let l = self.resolve_lipschitz(prob)?;
            if self.gamma * l >= 1.0 {
                return Err(Error::StepSizeTooLarge { gamma: self.gamma, limit: 1.0 / l });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn lasso() -> ProblemSpec {
        ProblemSpec::new(
            SmoothLoss::quadratic(DMatrix::identity(2, 2), DVector::from_vec(vec![-4.0, 0.0])),
            Penalty::l1(2, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn dimensions_must_agree() {
        let err = ProblemSpec::new(SmoothLoss::quadratic(DMatrix::identity(2, 2), DVector::zeros(2)), Penalty::l1(3, 1.0));
        assert_eq!(err.unwrap_err(), Error::DimensionMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn theory_mode_rejects_long_steps() {
        let prob = lasso();
        let cfg = SolverConfig { gamma: 1.0, theory_mode: true, ..Default::default() };
        assert!(matches!(cfg.validate(&prob), Err(Error::StepSizeTooLarge { .. })));
        let relaxed = SolverConfig { theory_mode: false, ..cfg };
        assert!(relaxed.validate(&prob).is_ok());
    }

    #[test]
    fn box_helpers() {
        let b = Bounds::uniform(2, -1.0, 1.0);
        let x = DVector::from_vec(vec![4.0, 0.5]);
        assert_eq!(b.distance(&x), 3.0);
        assert!((b.diameter() - 8f64.sqrt()).abs() < 1e-15);
        assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
    }
}
