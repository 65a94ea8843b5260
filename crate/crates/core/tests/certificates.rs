use calmkit::calmness::{check_foscms, check_nnamcq, check_polyhedral, Condition, Verdict};
use calmkit::scenarios::{example_instance, lasso_instance, ExampleCase};

#[test]
fn example_cases_match_their_verdicts() {
    for case in ExampleCase::ALL {
        let inst = example_instance(case).unwrap();
        let n = check_nnamcq(&inst.problem, &inst.point).unwrap();
        let f = check_foscms(&inst.problem, &inst.point).unwrap();
        let (conds, verdict) = case.expected();
        let hit = [&n, &f].iter().any(|r| conds.contains(&r.condition) && r.verdict == verdict);
        assert!(hit, "{case:?}: nnamcq {:?}, {:?} {:?}", n.verdict, f.condition, f.verdict);
    }
}

#[test]
fn degenerate_case_carries_a_witness_and_direction() {
    let inst = example_instance(ExampleCase::SlantedDegenerate).unwrap();
    let n = check_nnamcq(&inst.problem, &inst.point).unwrap();
    assert_eq!(n.verdict, Verdict::Fails);
    let (xi, eta) = n.witnesses[0].split_at(inst.point.len());
    assert!(eta.iter().any(|v| v.abs() > 1e-9));
    // ξ = ∇²f(z̄)η
    let h = inst.problem.loss.hessian(&inst.point).unwrap();
    let hv = h * nalgebra::DVector::from_column_slice(eta);
    for i in 0..xi.len() {
        assert!((hv[i] - xi[i]).abs() <= 1e-9 * (1.0 + xi[i].abs()));
    }
    let f = check_foscms(&inst.problem, &inst.point).unwrap();
    assert_eq!((f.condition, f.verdict), (Condition::Foscms, Verdict::Inconclusive));
    assert!(!f.critical_directions.is_empty());
}

#[test]
fn lasso_is_polyhedral() {
    let prob = lasso_instance(20, 6, 0.2, 3).unwrap();
    let r = check_polyhedral(&prob);
    assert_eq!((r.condition, r.verdict), (Condition::Polyhedral, Verdict::Holds));
}
