use calmkit::diagnostics::{classify_stationarity, verify_sufficient_descent, Stationarity};
use calmkit::scenarios::{self, random_start};
use calmkit::{pg_solve, ppa_solve, IterateTrace, SolverConfig};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pg_objective_never_increases(seed in 0u64..1000, frac in 0.1f64..0.99) {
        let prob = scenarios::quadratic_l1(5, seed).unwrap();
        let l = prob.loss.lipschitz_bound(None).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = random_start(5, 3.0, &mut rng);
        let cfg = SolverConfig { gamma: frac / l, max_iter: 200, lipschitz: Some(l), theory_mode: true, ..Default::default() };
        let trace = pg_solve(&prob, &cfg, &x0).unwrap();
        prop_assert!(trace.objectives.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs())));
        prop_assert!(verify_sufficient_descent(&trace, cfg.gamma, l).holds());
    }

    #[test]
    fn trace_csv_round_trips(seed in 0u64..1000) {
        let prob = scenarios::quadratic_group_lasso(2, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = random_start(4, 2.0, &mut rng);
        let trace = pg_solve(&prob, &SolverConfig { gamma: 0.1, max_iter: 25, ..Default::default() }, &x0).unwrap();
        let back = IterateTrace::from_csv(&trace.to_csv()).unwrap();
        prop_assert_eq!(back.points, trace.points);
        prop_assert_eq!(back.objectives, trace.objectives);
    }
}

#[test]
fn theory_mode_rejects_long_steps() {
    let prob = scenarios::quadratic_l1(4, 1).unwrap();
    let l = prob.loss.lipschitz_bound(None).unwrap().value;
    let cfg = SolverConfig { gamma: 1.01 / l, theory_mode: true, ..Default::default() };
    let err = pg_solve(&prob, &cfg, &DVector::zeros(4)).unwrap_err();
    assert!(err.to_string().contains("gamma < 1/L"));
}

#[test]
fn ppa_and_pg_reach_proximal_points_on_negabs() {
    for inst in scenarios::negabs_battery().unwrap().iter().take(4) {
        let prob = &inst.problem;
        let l = inst.lipschitz();
        let x0 = DVector::from_element(prob.n, 0.3);
        let cfg = SolverConfig { gamma: 0.5 / l, max_iter: 500, ..Default::default() };
        for trace in [pg_solve(prob, &cfg, &x0).unwrap(), ppa_solve(prob, &cfg, &x0).unwrap()] {
            assert_eq!(classify_stationarity(prob, trace.last(), 1e-8).unwrap(), Stationarity::Proximal);
        }
    }
}
