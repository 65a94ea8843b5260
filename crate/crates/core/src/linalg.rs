//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Relative tolerance used for the power iterations.
pub const POWER_TOL: f64 = 1e-10;

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration on the Rayleigh quotient.
pub fn largest_eigenvalue_psd(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    // deterministic, non-degenerate start
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64);
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = m * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / nw;
        if (next - lambda).abs() <= POWER_TOL * next.abs().max(1e-300) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // the Rayleigh quotient of the final unit vector is the tightest estimate
    let rq = v.dot(&(m * &v));
    rq.max(lambda)
}

/// Spectral norm of an arbitrary matrix, via the largest eigenvalue of `MᵀM`.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = if m.nrows() < m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    largest_eigenvalue_psd(&gram).max(0.0).sqrt()
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn symmetric_spectral_radius(m: &DMatrix<f64>) -> f64 {
    spectral_norm(m)
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, ncols: usize) -> DMatrix<f64> {
    if m.nrows() == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    // pad to a square-or-tall matrix so the SVD exposes every right singular vector
    let rows = m.nrows().max(ncols);
    let mut padded = DMatrix::zeros(rows, ncols);
    padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-10 * smax.max(1.0);
    let mut cols = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            cols.push(v_t.row(i).transpose());
        }
    }
    // singular values beyond min(rows, ncols) do not exist; rows >= ncols here
    if cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Numerical rank with the same tolerance as [`null_space`].
pub fn rank(m: &DMatrix<f64>) -> usize {
    m.ncols() - null_space(m, m.ncols()).ncols()
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    m.is_square() && (m - m.transpose()).amax() <= tol * (1.0 + m.amax())
}

/// Returns `Some(c)` when `m` is `c·I` up to `tol`.
pub fn scalar_multiple_of_identity(m: &DMatrix<f64>, tol: f64) -> Option<f64> {
    if !m.is_square() || m.nrows() == 0 {
        return None;
    }
    let c = m[(0, 0)];
    let scale = 1.0 + m.amax();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let expect = if i == j { c } else { 0.0 };
            if (m[(i, j)] - expect).abs() > tol * scale {
                return None;
            }
        }
    }
    Some(c)
}

pub fn is_psd(m: &DMatrix<f64>) -> bool {
    if !is_symmetric(m, 1e-12) {
        return false;
    }
    let eig = m.clone().symmetric_eigen();
    let scale = 1.0 + m.amax();
    eig.eigenvalues.iter().all(|&l| l >= -1e-12 * scale)
}
