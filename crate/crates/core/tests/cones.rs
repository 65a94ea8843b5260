mod common;

use calmkit::{Penalty, ScalarPenalty};
use proptest::prelude::*;

fn graph_point(phi: &ScalarPenalty, x: f64, t: f64) -> [f64; 2] {
    let iv = phi.prox_subdiff(x);
    let (lo, hi) = iv.intervals()[0];
    [x, lo + t * (hi - lo)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scad_cones_match_oracle_at_random_graph_points(x in -5.0f64..5.0, t in 0.0f64..1.0, snap in 0usize..4) {
        let phi = ScalarPenalty::Scad { lambda: 1.0, a: 3.0 };
        // bias a quarter of the draws onto the vertical segment at 0
        let x = if snap == 0 { 0.0 } else { x };
        let p = graph_point(&phi, x, t);
        let graph = Penalty::separable(1, phi).graph().unwrap();
        let dirs = common::tangent_directions(&phi, p, 1e-3);
        let cands = common::candidates(&dirs);
        let tangent = graph.tangent_cone(p).unwrap();
        let limiting = graph.limiting_normal_cone(p).unwrap();
        let regular = graph.regular_normal_cone(p).unwrap();
        prop_assert!(common::agrees(&tangent, |v| common::in_ray_union(&dirs, v, 1e-9), &cands, 1e-6));
        prop_assert!(common::agrees(&limiting, common::limiting_normal_oracle(&phi, p, 1e-3), &cands, 1e-6));
        prop_assert!(regular.is_subset_of(&limiting, 1e-9));
        prop_assert!(graph.directional_normal_cone(p, [0.0, 0.0]).unwrap().approx_eq(&limiting, 1e-9));
    }
}

#[test]
fn l1_corner_cones() {
    let phi = ScalarPenalty::L1 { lambda: 1.0 };
    let graph = Penalty::separable(1, phi).graph().unwrap();
    let t = graph.tangent_cone([0.0, 1.0]).unwrap();
    assert!(t.contains_with([1.0, 0.0], 1e-12) && t.contains_with([0.0, -1.0], 1e-12));
    assert!(!t.contains_with([-1.0, 0.0], 1e-12));
    let r = graph.regular_normal_cone([0.0, 1.0]).unwrap();
    assert!(r.contains_with([-1.0, 1.0], 1e-12) && !r.contains_with([1.0, 1.0], 1e-12));
}
