use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use tstar_core::gridworld::{collision_free, generate_scenario, Configuration, GridMap, Scenario};
use tstar_core::oracle::{OracleMemo, TransitionOracle};
use tstar_core::planner::{lattice, plan_tstar, plan_tstar_eps, plan_tstar_eps_with, plan_tstar_with, PlanStatus, PlannerOptions};
use tstar_core::vehicle::{VehicleParams, WindVector};

fn scenario(map: GridMap, start: Configuration, goal: Configuration) -> Scenario {
    Scenario::new(map, start, goal, VehicleParams::default(), WindVector::CALM).unwrap()
}

/// Dijkstra over every transition with its oracle cost and collision check.
fn exhaustive(s: &Scenario) -> f64 {
    let oracle = TransitionOracle::new(s.params, s.wind, s.map.cell_size).unwrap();
    lattice::shortest_path(&s.map, &s.start, &s.goal, |t| {
        let eval = oracle.evaluate_class(oracle.canonicalize(t).key).unwrap();
        let m = oracle.realize(t, &eval, s.map.pose_of(&t.from));
        collision_free(&m, &s.map).then_some(eval.cost)
    })
    .map_or(f64::INFINITY, |(c, _)| c)
}

#[test]
fn straight_three_by_three() {
    let s = scenario(GridMap::empty(3, 3), Configuration::new(0, 1, 0), Configuration::new(2, 1, 0));
    let r = plan_tstar(&s).unwrap();
    assert_abs_diff_eq!(r.cost, 2.0, epsilon = 1e-9);
    assert_eq!(r.path.len(), 2);
    assert_eq!(r.stats.precompute_oracle_calls, 68);
}

#[test]
fn straight_line_is_cheap_for_lazy_search() {
    let s = scenario(GridMap::empty(8, 3), Configuration::new(0, 1, 0), Configuration::new(7, 1, 0));
    for eps in [0.0, 0.5, 2.0] {
        let r = plan_tstar_eps(&s, eps).unwrap();
        assert_abs_diff_eq!(r.cost, 7.0, epsilon = 1e-9);
        assert!(r.stats.oracle_calls <= 3, "eps {eps}: {} calls", r.stats.oracle_calls);
    }
}

#[test]
fn enclosed_goal_has_no_solution() {
    let mut map = GridMap::empty(5, 5);
    for (x, y) in [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 3), (2, 3), (3, 3)] {
        map.set_blocked(x, y, true);
    }
    let s = scenario(map, Configuration::new(0, 0, 0), Configuration::new(2, 2, 0));
    let r = plan_tstar(&s).unwrap();
    assert_eq!(r.status, PlanStatus::NoSolution);
    assert!(r.cost.is_infinite());
    let r = plan_tstar_eps(&s, 1.0).unwrap();
    assert_eq!(r.status, PlanStatus::NoSolution);
}

#[test]
fn tstar_matches_exhaustive_dijkstra() {
    for seed in [42, 3, 17] {
        let s = generate_scenario(seed, 10, 10, 0.25).unwrap();
        let r = plan_tstar(&s).unwrap();
        assert_abs_diff_eq!(r.cost, exhaustive(&s), epsilon = 1e-9);
    }
}

#[test]
fn path_chains_and_is_collision_free() {
    let s = generate_scenario(11, 12, 12, 0.25).unwrap();
    let r = plan_tstar_eps(&s, 0.5).unwrap();
    assert!(r.is_solved());
    let mut at = s.map.pose_of(&s.start);
    let mut total = 0.0;
    for step in &r.path {
        assert!(step.maneuver.start.position_error(&at) < 1e-9);
        assert!(collision_free(&step.maneuver, &s.map));
        at = s.map.pose_of(&step.transition.to);
        let end = step.maneuver.ground_endpoint();
        assert!(end.position_error(&at) < 1e-6, "endpoint off by {}", end.position_error(&at));
        total += step.maneuver.total_time;
    }
    assert_abs_diff_eq!(total, r.cost, epsilon = 1e-9);
    assert_eq!(r.configurations().last(), Some(&s.goal));
}

#[test]
fn trace_properties() {
    for seed in 0..4 {
        let s = generate_scenario(seed, 14, 14, 0.25).unwrap();
        for eps in [0.0, 0.3, 1.0] {
            let opts = PlannerOptions { trace: true, ..Default::default() };
            let r = plan_tstar_eps_with(&s, eps, &opts).unwrap();
            let trace = r.trace.unwrap();
            assert!(!trace.pops.is_empty());
            for p in &trace.pops {
                // focal containment
                assert!(p.f <= (1.0 + eps) * p.f_min + 1e-12, "{p:?}");
                // κ priority
                if p.kappa == 1 {
                    assert!(!p.evaluated_in_focal, "{p:?}");
                }
            }
            for &(before, after) in &trace.reinsertions {
                assert!(after >= before - 1e-12);
            }
        }
    }
}

#[test]
fn warm_memo_needs_no_oracle_calls() {
    let s = generate_scenario(5, 10, 10, 0.2).unwrap();
    let oracle = TransitionOracle::new(s.params, s.wind, s.map.cell_size).unwrap();
    let memo = Arc::new(OracleMemo::new(*oracle.settings()));
    let opts = PlannerOptions { memo: Some(memo.clone()), ..Default::default() };
    let cold = plan_tstar_with(&s, &opts).unwrap();
    assert_eq!(cold.stats.oracle_calls, 68);
    assert_eq!(memo.len(), 68);
    // calls are still counted per query, but their time comes from the memo
    let warm = plan_tstar_with(&s, &opts).unwrap();
    assert_eq!(warm.cost, cold.cost);
    assert_eq!(warm.stats.oracle_calls, 68);
    assert_eq!(memo.len(), 68);
}

#[test]
fn precompute_under_wind_evaluates_every_transition() {
    let s = generate_scenario(2, 6, 6, 0.1).unwrap();
    let s = s.with_conditions(VehicleParams::with_v_min(0.5).unwrap(), WindVector::new(0.15, 0.05)).unwrap();
    let r = plan_tstar(&s).unwrap();
    assert_eq!(r.stats.precompute_oracle_calls, 512);
    let lazy = plan_tstar_eps(&s, 1.0).unwrap();
    assert!(lazy.stats.oracle_calls < 512);
    assert!(lazy.cost <= 2.0 * r.cost + 1e-9);
}

#[test]
fn rejects_negative_epsilon() {
    let s = scenario(GridMap::empty(3, 3), Configuration::new(0, 1, 0), Configuration::new(2, 1, 0));
    assert!(plan_tstar_eps(&s, -0.1).is_err());
    assert!(plan_tstar_eps(&s, f64::NAN).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bounded_suboptimality(seed in 0u64..10_000, eps in prop::sample::select(vec![0.0, 0.1, 0.5, 2.0])) {
        let s = generate_scenario(seed, 8, 8, 0.25).unwrap();
        let opt = plan_tstar(&s).unwrap();
        let r = plan_tstar_eps(&s, eps).unwrap();
        prop_assert!(r.cost <= (1.0 + eps) * opt.cost + 1e-9);
        prop_assert!(r.stats.oracle_calls <= 68);
        if eps == 0.0 {
            prop_assert!((r.cost - opt.cost).abs() <= 1e-9);
        }
    }
}
