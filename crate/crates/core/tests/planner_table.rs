mod common;

use pacsafe::params::PacParams;
use pacsafe::planner::plan;

#[test]
fn printed_sample_sizes() {
    common::planner_table().unwrap();
}

#[test]
fn vc_route_needs_more_samples_than_scenario_route() {
    for n in 2..=4 {
        let scen = plan(&PacParams::rbc1(), n).unwrap();
        let vc = plan(&PacParams::rbc1_vc(None), n).unwrap();
        assert!(vc.n_states > scen.n_states, "n={n}");
        assert_eq!(vc.vc_dim, Some(scen.decision_dim));
    }
}

#[test]
fn rbc2_hypothesis_violation_is_reported() {
    let mut p = PacParams::rbc2();
    p.alpha1 = 0.5;
    let err = plan(&p, 2).unwrap_err().to_string();
    assert!(err.contains("alpha1"), "{err}");
}
