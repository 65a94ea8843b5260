use calmkit::constrained::{gpadmm_solve, pdhg_solve, ConvexTerm, LinearlyConstrainedProblem, SaddleProblem};
use calmkit::{linalg, Penalty, SolverConfig};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, &v[..rows * cols])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Strongly convex quadratic pieces: every step keeps the perturbed KKT
    // inclusion, and the mapped perturbation vanishes in the y-row.
    #[test]
    fn admm_steps_satisfy_the_perturbed_kkt_system(
        a in proptest::collection::vec(-1.0f64..1.0, 6),
        c in proptest::collection::vec(-2.0f64..2.0, 3),
        beta in 0.2f64..3.0,
    ) {
        let a = matrix(3, 2, &a);
        let prob = LinearlyConstrainedProblem::new(
            ConvexTerm::quadratic(DMatrix::identity(2, 2), DVector::zeros(2)),
            ConvexTerm::quadratic(DMatrix::identity(3, 3) * 2.0, DVector::from_row_slice(&c)),
            a,
            -DMatrix::identity(3, 3),
            DVector::zeros(3),
        ).unwrap();
        let cfg = SolverConfig { max_iter: 60, stop_tol: 0.0, ..Default::default() };
        let z = (&DVector::zeros(2), &DVector::zeros(3), &DVector::zeros(3));
        let t = gpadmm_solve(&prob, beta, &DMatrix::zeros(2, 2), &DMatrix::zeros(3, 3), &cfg, z).unwrap();
        prop_assert!(t.all_inclusions_hold());
        prop_assert!(t.mapped.iter().all(|h| h.rows(2, 3).iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn pdhg_converges_under_the_step_condition(k in proptest::collection::vec(-1.0f64..1.0, 4), frac in 0.2f64..0.95) {
        let k = matrix(2, 2, &k);
        let norm = linalg::spectral_norm(&k).max(1e-3);
        let prob = SaddleProblem::new(
            ConvexTerm::quadratic(DMatrix::identity(2, 2), DVector::from_row_slice(&[-1.0, 0.5])),
            ConvexTerm::quadratic(DMatrix::identity(2, 2), DVector::zeros(2)),
            k.clone(),
        ).unwrap();
        let step = frac.sqrt() / norm;
        let cfg = SolverConfig { max_iter: 3000, stop_tol: 0.0, theory_mode: true, ..Default::default() };
        let t = pdhg_solve(&prob, step, step, &cfg, (&DVector::zeros(2), &DVector::zeros(2))).unwrap();
        let x_star = (DMatrix::identity(2, 2) + k.transpose() * &k).lu().solve(&DVector::from_row_slice(&[1.0, -0.5])).unwrap();
        prop_assert!((t.xs.last().unwrap() - x_star).norm() <= 1e-6);
        prop_assert!(t.all_inclusions_hold());
    }
}

#[test]
fn pdhg_theory_mode_checks_step_product() {
    let prob = SaddleProblem::new(
        ConvexTerm::quadratic(DMatrix::identity(1, 1), DVector::zeros(1)),
        ConvexTerm::quadratic(DMatrix::identity(1, 1), DVector::zeros(1)),
        DMatrix::from_element(1, 1, 2.0),
    )
    .unwrap();
    let cfg = SolverConfig { theory_mode: true, ..Default::default() };
    assert!(pdhg_solve(&prob, 1.0, 1.0, &cfg, (&DVector::zeros(1), &DVector::zeros(1))).is_err());
}

#[test]
fn admm_rejects_penalty_subproblems_without_identity_curvature() {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    let prob = LinearlyConstrainedProblem::new(
        ConvexTerm::Penalty(Penalty::l1(2, 0.5)),
        ConvexTerm::quadratic(DMatrix::identity(2, 2), DVector::zeros(2)),
        a,
        -DMatrix::identity(2, 2),
        DVector::zeros(2),
    )
    .unwrap();
    let z = DVector::zeros(2);
    let cfg = SolverConfig { max_iter: 5, ..Default::default() };
    assert!(gpadmm_solve(&prob, 1.0, &DMatrix::zeros(2, 2), &DMatrix::zeros(2, 2), &cfg, (&z, &z, &z)).is_err());
}
