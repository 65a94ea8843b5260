//! Smooth loss families: value, gradient, Hessian and Lipschitz bounds.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::problem::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossFamily {
    Quadratic,
    StructuredComposite,
    Logistic,
    Exponential,
    SigmoidNn,
}

impl LossFamily {
    pub fn name(self) -> &'static str {
        match self {
            LossFamily::Quadratic => "quadratic",
            LossFamily::StructuredComposite => "structured-composite",
            LossFamily::Logistic => "logistic",
            LossFamily::Exponential => "exponential",
            LossFamily::SigmoidNn => "sigmoid-nn",
        }
    }
}

/// A smooth part `f` of the composite objective.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothLoss {
    /// `½xᵀQx + qᵀx` with `Q` symmetric.
    Quadratic { q_mat: DMatrix<f64>, q_vec: DVector<f64> },
    /// `h(Ax) + qᵀx` with `h(z) = ½(z − c)ᵀW(z − c)`, `W` symmetric positive definite.
    Composite {
        a: DMatrix<f64>,
        weight: DMatrix<f64>,
        center: DVector<f64>,
        q_vec: DVector<f64>,
    },
    /// `Σ log(1 + exp(−dᵢ cᵢᵀx))`, rows of `data` are the `cᵢ`.
    Logistic { data: DMatrix<f64>, labels: DVector<f64> },
    /// `Σ exp(−dᵢ cᵢᵀx)`.
    Exponential { data: DMatrix<f64>, labels: DVector<f64> },
    /// One-hidden-layer sigmoid network with squared loss.
    ///
    /// The variable is laid out as `(w_1, …, w_p, u)` where each `w_j` has the
    /// input dimension and `u ∈ ℝ^p`.
    SigmoidNn {
        inputs: DMatrix<f64>,
        targets: DVector<f64>,
        hidden: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundScope {
    Global,
    Box,
}

/// Upper bound on the Lipschitz modulus of the gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBound {
    pub value: f64,
    pub scope: BoundScope,
    pub domain: Option<Bounds>,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(t))` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

// sup |σ''| = 1/(6√3)
const SIGMOID_SECOND_SUP: f64 = 0.096_225_044_864_937_63;

struct NnForward {
    h: Vec<f64>,
    out: f64,
}

impl SmoothLoss {
    pub fn quadratic(q_mat: DMatrix<f64>, q_vec: DVector<f64>) -> Self {
        SmoothLoss::Quadratic { q_mat, q_vec }
    }

    /// Least squares `½‖Ax − c‖²` as a structured composite.
    pub fn least_squares(a: DMatrix<f64>, center: DVector<f64>) -> Self {
        let n = a.ncols();
        let m = a.nrows();
        SmoothLoss::Composite {
            a,
            weight: DMatrix::identity(m, m),
            center,
            q_vec: DVector::zeros(n),
        }
    }

    pub fn logistic(data: DMatrix<f64>, labels: DVector<f64>) -> Self {
        SmoothLoss::Logistic { data, labels }
    }

    pub fn exponential(data: DMatrix<f64>, labels: DVector<f64>) -> Self {
        SmoothLoss::Exponential { data, labels }
    }

    pub fn family(&self) -> LossFamily {
        match self {
            SmoothLoss::Quadratic { .. } => LossFamily::Quadratic,
            SmoothLoss::Composite { .. } => LossFamily::StructuredComposite,
            SmoothLoss::Logistic { .. } => LossFamily::Logistic,
            SmoothLoss::Exponential { .. } => LossFamily::Exponential,
            SmoothLoss::SigmoidNn { .. } => LossFamily::SigmoidNn,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SmoothLoss::Quadratic { q_mat, .. } => q_mat.ncols(),
            SmoothLoss::Composite { a, .. } => a.ncols(),
            SmoothLoss::Logistic { data, .. } | SmoothLoss::Exponential { data, .. } => data.ncols(),
            SmoothLoss::SigmoidNn { inputs, hidden, .. } => hidden * inputs.ncols() + hidden,
        }
    }

    /// Whether the gradient is an affine map.
    pub fn has_affine_gradient(&self) -> bool {
        matches!(self, SmoothLoss::Quadratic { .. } | SmoothLoss::Composite { .. })
    }

    pub fn is_convex(&self) -> bool {
        match self {
            SmoothLoss::Quadratic { q_mat, .. } => linalg::is_psd(q_mat),
            SmoothLoss::SigmoidNn { .. } => false,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SmoothLoss::Quadratic { q_mat, q_vec } => {
                check_dim(q_mat.nrows(), q_mat.ncols())?;
                check_dim(q_mat.ncols(), q_vec.len())?;
                if !linalg::is_symmetric(q_mat, 1e-12) {
                    return Err(Error::InvalidConfig("quadratic loss matrix must be symmetric".into()));
                }
            }
            SmoothLoss::Composite { a, weight, center, q_vec } => {
                check_dim(a.nrows(), center.len())?;
                check_dim(a.ncols(), q_vec.len())?;
                check_dim(a.nrows(), weight.nrows())?;
                check_dim(a.nrows(), weight.ncols())?;
                let eig = weight.clone().symmetric_eigen();
                if !linalg::is_symmetric(weight, 1e-12) || eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                    return Err(Error::InvalidConfig(
                        "composite loss needs a symmetric positive definite weight".into(),
                    ));
                }
            }
            SmoothLoss::Logistic { data, labels } | SmoothLoss::Exponential { data, labels } => {
                check_dim(data.nrows(), labels.len())?;
                if labels.iter().any(|d| !d.is_finite()) {
                    return Err(Error::InvalidConfig("labels must be finite".into()));
                }
            }
            SmoothLoss::SigmoidNn { inputs, targets, hidden } => {
                check_dim(inputs.nrows(), targets.len())?;
                if *hidden == 0 {
                    return Err(Error::InvalidConfig("sigmoid-nn needs at least one hidden node".into()));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            SmoothLoss::Quadratic { q_mat, q_vec } => 0.5 * x.dot(&(q_mat * x)) + q_vec.dot(x),
            SmoothLoss::Composite { a, weight, center, q_vec } => {
                let r = a * x - center;
                0.5 * r.dot(&(weight * &r)) + q_vec.dot(x)
            }
            SmoothLoss::Logistic { data, labels } => {
                let m = data * x;
                m.iter().zip(labels.iter()).map(|(mi, di)| softplus(-di * mi)).sum()
            }
            SmoothLoss::Exponential { data, labels } => {
                let m = data * x;
                m.iter().zip(labels.iter()).map(|(mi, di)| (-di * mi).exp()).sum()
            }
            SmoothLoss::SigmoidNn { inputs, targets, .. } => (0..inputs.nrows())
                .map(|i| {
                    let r = self.nn_forward(x, i).out - targets[i];
                    0.5 * r * r
                })
                .sum(),
        })
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            SmoothLoss::Quadratic { q_mat, q_vec } => q_mat * x + q_vec,
            SmoothLoss::Composite { a, weight, center, q_vec } => {
                let r = a * x - center;
                a.transpose() * (weight * r) + q_vec
            }
            SmoothLoss::Logistic { data, labels } => {
                let m = data * x;
                let coeff = DVector::from_fn(m.len(), |i, _| -labels[i] * sigmoid(-labels[i] * m[i]));
                data.transpose() * coeff
            }
            SmoothLoss::Exponential { data, labels } => {
                let m = data * x;
                let coeff = DVector::from_fn(m.len(), |i, _| -labels[i] * (-labels[i] * m[i]).exp());
                data.transpose() * coeff
            }
            SmoothLoss::SigmoidNn { inputs, targets, .. } => {
                let mut g = DVector::zeros(x.len());
                for i in 0..inputs.nrows() {
                    let fw = self.nn_forward(x, i);
                    let r = fw.out - targets[i];
                    let scale = r * fw.out * (1.0 - fw.out);
                    g += self.nn_output_gradient(x, i, &fw) * scale;
                }
                g
            }
        })
    }

    pub fn hessian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            SmoothLoss::Quadratic { q_mat, .. } => q_mat.clone(),
            SmoothLoss::Composite { a, weight, .. } => a.transpose() * weight * a,
            SmoothLoss::Logistic { data, labels } => {
                let m = data * x;
                let w = DVector::from_fn(m.len(), |i, _| {
                    let s = sigmoid(labels[i] * m[i]);
                    labels[i] * labels[i] * s * (1.0 - s)
                });
                weighted_gram(data, &w)
            }
            SmoothLoss::Exponential { data, labels } => {
                let m = data * x;
                let w = DVector::from_fn(m.len(), |i, _| labels[i] * labels[i] * (-labels[i] * m[i]).exp());
                weighted_gram(data, &w)
            }
            SmoothLoss::SigmoidNn { inputs, targets, .. } => {
                let n = x.len();
                let mut hess = DMatrix::zeros(n, n);
                for i in 0..inputs.nrows() {
                    let fw = self.nn_forward(x, i);
                    let r = fw.out - targets[i];
                    let o1 = fw.out * (1.0 - fw.out);
                    let o2 = o1 * (1.0 - 2.0 * fw.out);
                    let gs = self.nn_output_gradient(x, i, &fw);
                    hess += &gs * gs.transpose() * (o1 * o1 + r * o2);
                    hess += self.nn_output_hessian(x, i, &fw) * (r * o1);
                }
                hess
            }
        })
    }

    /// Upper bound on the gradient's Lipschitz modulus, globally or over `domain`.
    pub fn lipschitz_bound(&self, domain: Option<&Bounds>) -> Result<LipschitzBound> {
        let global = |value: f64| LipschitzBound { value, scope: BoundScope::Global, domain: None };
        match self {
            SmoothLoss::Quadratic { q_mat, .. } => Ok(global(linalg::symmetric_spectral_radius(q_mat))),
            SmoothLoss::Composite { a, weight, .. } => {
                let na = linalg::spectral_norm(a);
                Ok(global(linalg::largest_eigenvalue_psd(weight) * na * na))
            }
            SmoothLoss::Logistic { data, labels } => {
                let scaled = DMatrix::from_fn(data.nrows(), data.ncols(), |i, j| labels[i] * data[(i, j)]);
                let nc = linalg::spectral_norm(&scaled);
                Ok(global(0.25 * nc * nc))
            }
            SmoothLoss::Exponential { data, labels } => {
                let dom = domain.ok_or(Error::NoGlobalLipschitz("exponential"))?;
                check_dim(self.dim(), dom.dim())?;
                let mut total = 0.0;
                for i in 0..data.nrows() {
                    // max of −dᵢcᵢᵀx over the box sits at a corner
                    let mut exponent = 0.0;
                    for j in 0..data.ncols() {
                        let c = -labels[i] * data[(i, j)];
                        exponent += (c * dom.lower[j]).max(c * dom.upper[j]);
                    }
                    let row_sq = data.row(i).norm_squared();
                    total += labels[i] * labels[i] * row_sq * exponent.exp();
                }
                Ok(LipschitzBound { value: total, scope: BoundScope::Box, domain: Some(dom.clone()) })
            }
            SmoothLoss::SigmoidNn { inputs, targets, hidden } => {
                let dom = domain.ok_or(Error::NoGlobalLipschitz("sigmoid-nn"))?;
                check_dim(self.dim(), dom.dim())?;
                let d = inputs.ncols();
                let p = *hidden;
                let u_max: Vec<f64> = (0..p)
                    .map(|j| dom.lower[p * d + j].abs().max(dom.upper[p * d + j].abs()))
                    .collect();
                let u_sq: f64 = u_max.iter().map(|u| u * u).sum();
                let mut total = 0.0;
                for i in 0..inputs.nrows() {
                    let a_norm = inputs.row(i).norm();
                    let r_max = targets[i].abs().max((1.0 - targets[i]).abs());
                    // ‖∇s‖² ≤ p + (1/16)‖a‖²Σu_j²
                    let gs_sq = p as f64 + a_norm * a_norm * u_sq / 16.0;
                    let inner = u_max
                        .iter()
                        .map(|u| 0.25 * a_norm + u * SIGMOID_SECOND_SUP * a_norm * a_norm)
                        .fold(0.0, f64::max);
                    total += (1.0 / 16.0 + r_max * SIGMOID_SECOND_SUP) * gs_sq + r_max * 0.25 * inner;
                }
                Ok(LipschitzBound { value: total, scope: BoundScope::Box, domain: Some(dom.clone()) })
            }
        }
    }

    fn nn_forward(&self, x: &DVector<f64>, i: usize) -> NnForward {
        let SmoothLoss::SigmoidNn { inputs, hidden, .. } = self else {
            unreachable!("sigmoid-nn helper on another family")
        };
        let d = inputs.ncols();
        let p = *hidden;
        let mut h = vec![0.0; p];
        let mut s = 0.0;
        for j in 0..p {
            let z: f64 = (0..d).map(|k| x[j * d + k] * inputs[(i, k)]).sum();
            h[j] = sigmoid(z);
            s += x[p * d + j] * h[j];
        }
        NnForward { h, out: sigmoid(s) }
    }

    /// Gradient of the pre-activation output `s = Σ u_j σ(w_jᵀa)`.
    fn nn_output_gradient(&self, x: &DVector<f64>, i: usize, fw: &NnForward) -> DVector<f64> {
        let SmoothLoss::SigmoidNn { inputs, hidden, .. } = self else {
            unreachable!("sigmoid-nn helper on another family")
        };
        let d = inputs.ncols();
        let p = *hidden;
        let mut g = DVector::zeros(x.len());
        for j in 0..p {
            let hp = fw.h[j] * (1.0 - fw.h[j]);
            let u = x[p * d + j];
            for k in 0..d {
                g[j * d + k] = u * hp * inputs[(i, k)];
            }
            g[p * d + j] = fw.h[j];
        }
        g
    }

    fn nn_output_hessian(&self, x: &DVector<f64>, i: usize, fw: &NnForward) -> DMatrix<f64> {
        let SmoothLoss::SigmoidNn { inputs, hidden, .. } = self else {
            unreachable!("sigmoid-nn helper on another family")
        };
        let d = inputs.ncols();
        let p = *hidden;
        let n = x.len();
        let mut hs = DMatrix::zeros(n, n);
        for j in 0..p {
            let h = fw.h[j];
            let hp = h * (1.0 - h);
            let hpp = hp * (1.0 - 2.0 * h);
            let u = x[p * d + j];
            let uj = p * d + j;
            for k in 0..d {
                let ak = inputs[(i, k)];
                hs[(j * d + k, uj)] = hp * ak;
                hs[(uj, j * d + k)] = hp * ak;
                for l in 0..d {
                    hs[(j * d + k, j * d + l)] = u * hpp * ak * inputs[(i, l)];
                }
            }
        }
        hs
    }
}

fn weighted_gram(data: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let scaled = DMatrix::from_fn(data.nrows(), data.ncols(), |i, j| w[i] * data[(i, j)]);
    data.transpose() * scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn central_gradient(loss: &SmoothLoss, x: &DVector<f64>, h: f64) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            (loss.value(&xp).unwrap() - loss.value(&xm).unwrap()) / (2.0 * h)
        })
    }

    #[test]
    fn quadratic_value_and_gradient() {
        let loss = SmoothLoss::quadratic(DMatrix::identity(2, 2), DVector::zeros(2));
        assert_eq!(loss.value(&v(&[3.0, 4.0])).unwrap(), 12.5);
        assert_eq!(loss.gradient(&v(&[3.0, 4.0])).unwrap(), v(&[3.0, 4.0]));
    }

    #[test]
    fn exponential_at_origin() {
        let loss = SmoothLoss::exponential(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), v(&[1.0]));
        let x = v(&[0.0, 0.0]);
        assert_eq!(loss.value(&x).unwrap(), 1.0);
        let g = loss.gradient(&x).unwrap();
        let fd = central_gradient(&loss, &x, 1e-6);
        assert!((g.clone() - fd).amax() <= 1e-8);
        assert_abs_diff_eq!(g[0], -1.0, epsilon = 1e-15);
        let h = loss.hessian(&x).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn logistic_one_dimensional() {
        let loss = SmoothLoss::logistic(DMatrix::from_row_slice(1, 1, &[1.0]), v(&[1.0]));
        assert_abs_diff_eq!(loss.value(&v(&[0.0])).unwrap(), std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(loss.hessian(&v(&[0.0])).unwrap()[(0, 0)], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn logistic_is_stable_for_large_margins() {
        let loss = SmoothLoss::logistic(DMatrix::from_row_slice(1, 1, &[1.0]), v(&[1.0]));
        assert!(loss.value(&v(&[-800.0])).unwrap().is_finite());
        assert!(loss.value(&v(&[800.0])).unwrap() >= 0.0);
    }

    #[test]
    fn sigmoid_nn_gradient_matches_differences() {
        let loss = SmoothLoss::SigmoidNn {
            inputs: DMatrix::from_row_slice(1, 1, &[1.0]),
            targets: v(&[0.0]),
            hidden: 1,
        };
        let x = v(&[0.0, 0.0]);
        let g = loss.gradient(&x).unwrap();
        let fd = central_gradient(&loss, &x, 1e-6);
        assert!((g - fd).amax() <= 1e-6);
    }

    #[test]
    fn sigmoid_nn_random_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inputs = DMatrix::from_fn(4, 3, |_, _| rng.gen_range(-1.0..1.0));
        let targets = DVector::from_fn(4, |_, _| rng.gen_range(0.0..1.0));
        let loss = SmoothLoss::SigmoidNn { inputs, targets, hidden: 2 };
        for _ in 0..20 {
            let x = DVector::from_fn(loss.dim(), |_, _| rng.gen_range(-2.0..2.0));
            let g = loss.gradient(&x).unwrap();
            let fd = central_gradient(&loss, &x, 1e-6);
            assert!((g.clone() - fd).amax() <= 1e-6 * (1.0 + g.amax()));
        }
    }

    #[test]
    fn lipschitz_examples() {
        let q = SmoothLoss::quadratic(DMatrix::from_diagonal(&v(&[2.0, 1.0])), DVector::zeros(2));
        assert_abs_diff_eq!(q.lipschitz_bound(None).unwrap().value, 2.0, epsilon = 1e-9);

        let lg = SmoothLoss::logistic(DMatrix::identity(2, 2), v(&[1.0, -1.0]));
        assert_abs_diff_eq!(lg.lipschitz_bound(None).unwrap().value, 0.25, epsilon = 1e-9);

        let ex = SmoothLoss::exponential(DMatrix::from_row_slice(1, 1, &[1.0]), v(&[1.0]));
        assert_eq!(ex.lipschitz_bound(None).unwrap_err(), Error::NoGlobalLipschitz("exponential"));
        let dom = Bounds::uniform(1, -1.0, 1.0);
        assert_abs_diff_eq!(ex.lipschitz_bound(Some(&dom)).unwrap().value, std::f64::consts::E, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = SmoothLoss::quadratic(DMatrix::identity(2, 2), DVector::zeros(2));
        assert_eq!(
            q.value(&v(&[1.0])).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 1 }
        );
    }
}
