use proptest::prelude::*;
use spacelog::formulation::{
    all_participants, baseline_cost, baseline_run, flow_records, mission_cost, player_cost, solve_mission, verify_solution, AlphaSpec,
    CostComponent, CostSettings, MissionRun, ObjectiveMode,
};
use spacelog::game::MilpCostEvaluator;
use spacelog::model::{fixtures, ArcKind, CommodityRole, ScenarioConfig};
use spacelog::Error;

fn settings() -> CostSettings {
    CostSettings::default()
}

/// Every spacecraft count on a launch or transport arc is a whole number.
fn assert_whole_spacecraft(cfg: &ScenarioConfig, run: &MissionRun) {
    let sc = cfg.commodity_with_role(CommodityRole::Spacecraft).unwrap();
    for (key, var) in &run.formulation.flows {
        if key.commodity != sc {
            continue;
        }
        let k = run.formulation.participants.iter().position(|p| p.player == key.player).unwrap();
        let v = run.solution.values[var.0];
        let kind = run.formulation.networks[k].edges[key.edge].kind;
        assert!((v - v.round()).abs() < 1e-6, "{kind:?} arc carries {v} spacecraft");
    }
}

#[test]
fn nominal_cost_curves_are_anchored_and_monotone() {
    let cfg = fixtures::lunar_nominal();
    let s = settings();
    let q = baseline_cost(&cfg, &s).unwrap().value;
    assert!(q > 0.0 && q.is_finite());
    let coord = cfg.coordinator_index().unwrap();
    let player = cfg.commercial_indices()[0];
    assert_eq!(player_cost(&cfg, coord, 0.0, 4, &s).unwrap().value, 0.0);
    assert_eq!(player_cost(&cfg, player, 0.0, 4, &s).unwrap().value, 0.0);
    let j_o1 = player_cost(&cfg, coord, 1.0, cfg.players[coord].fleet_per_mission, &s).unwrap().value;
    assert!((j_o1 - q).abs() <= 1e-9 * q, "J_o(1) = {j_o1}, Q = {q}");

    for z in [coord, player] {
        let mut last = 0.0;
        for i in 1..=4 {
            let j = player_cost(&cfg, z, i as f64 / 4.0, 4, &s).unwrap().value;
            assert!(j >= last - 1e-6 * q, "player {z}: J({}) = {j} < {last}", i as f64 / 4.0);
            last = j;
        }
    }
}

#[test]
fn baseline_solution_is_physical() {
    let cfg = fixtures::lunar_nominal();
    let run = baseline_run(&cfg, &settings()).unwrap();
    assert!(run.is_optimal());
    assert!(verify_solution(&cfg, &run.formulation, &run.solution.values).is_empty());
    assert_whole_spacecraft(&cfg, &run);
    let attr = run.attribution();
    let parts: f64 = CostComponent::ALL.iter().map(|&c| attr.component(c)).sum();
    assert!((parts - attr.total).abs() <= 1e-6 * attr.total);
    assert!((attr.total - run.solution.objective_value).abs() <= 1e-6 * attr.total);
    // both deployment windows deliver the full demand to the Moon
    let delivered: f64 = flow_records(&cfg, &run.formulation, &run.solution.values)
        .iter()
        .filter(|f| f.commodity == "infrastructure" && f.to == "Moon" && f.from != "Moon")
        .map(|f| f.amount)
        .sum();
    assert!((delivered - 2.0 * cfg.deployment_demand_total).abs() < 1e-3, "{delivered}");
}

#[test]
fn no_deployment_costs_nothing() {
    let mut cfg = fixtures::lunar_nominal();
    cfg.deployment.release_days.clear();
    cfg.deployment.due_days.clear();
    let run = baseline_run(&cfg, &settings()).unwrap();
    assert!(run.is_optimal());
    assert_eq!(run.solution.objective_value, 0.0);
    assert!(run.solution.values.iter().all(|&v| v == 0.0));
    assert_eq!(baseline_cost(&cfg, &settings()).unwrap().value, 0.0);
}

#[test]
fn demand_beyond_fleet_capacity_is_infeasible() {
    let mut cfg = fixtures::lunar_nominal();
    for p in &mut cfg.players {
        p.fleet_per_mission = 2;
    }
    cfg.deployment_demand_total = 60_000.0;
    let q = baseline_cost(&cfg, &settings()).unwrap();
    assert!(!q.is_feasible());
    assert!(matches!(MilpCostEvaluator::new(cfg, settings()), Err(Error::Argument(_))));
}

#[test]
fn both_players_together_never_cost_more_than_apart() {
    // joint solve of a split may share nothing, so it is at most the sum of the solo costs
    let cfg = fixtures::lunar_nominal();
    let s = settings();
    let parts = all_participants(&cfg);
    let joint = mission_cost(&cfg, &parts, &[0.5], &s).unwrap().value;
    let coord = cfg.coordinator_index().unwrap();
    let player = cfg.commercial_indices()[0];
    let apart = player_cost(&cfg, coord, 0.5, 4, &s).unwrap().value + player_cost(&cfg, player, 0.5, 4, &s).unwrap().value;
    assert!(joint <= apart + 1e-6 * apart, "{joint} > {apart}");
}

#[test]
fn finer_time_step_still_solves() {
    let mut cfg = fixtures::lunar_nominal();
    cfg.time_grid.step = 15;
    assert!(spacelog::model::validate_scenario(&cfg).is_empty());
    let run = baseline_run(&cfg, &settings()).unwrap();
    assert!(run.is_optimal());
    assert!(verify_solution(&cfg, &run.formulation, &run.solution.values).is_empty());
}

#[test]
fn pruning_does_not_change_costs() {
    let cfg = fixtures::lunar_nominal();
    let mut raw = settings();
    raw.assembly.prune = false;
    let a = baseline_cost(&cfg, &settings()).unwrap().value;
    let b = baseline_cost(&cfg, &raw).unwrap().value;
    assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// Optimal joint missions balance mass, follow the rocket equation and
    /// ISRU stoichiometry, and fly whole spacecraft.
    #[test]
    fn optimal_missions_are_physical(
        demand in 5_000.0f64..35_000.0,
        plant in prop_oneof![Just(0.0), 2_000.0f64..20_000.0],
        alpha in 0.0f64..=1.0,
        fleet in 2u32..=4,
    ) {
        let mut cfg = fixtures::lunar_nominal();
        cfg.deployment_demand_total = demand;
        let player = cfg.commercial_indices()[0];
        cfg.players[player].isru_plant_mass = plant;
        for p in &mut cfg.players {
            p.fleet_per_mission = fleet;
        }
        let parts = all_participants(&cfg);
        let run = solve_mission(&cfg, &parts, &AlphaSpec::Fixed(vec![alpha]), ObjectiveMode::MinTotalCost, &settings()).unwrap();
        if run.is_optimal() {
            let v = verify_solution(&cfg, &run.formulation, &run.solution.values);
            prop_assert!(v.is_empty(), "{v:?}");
            assert_whole_spacecraft(&cfg, &run);
            prop_assert!(run.solution.objective_value >= 0.0);
        }
    }

    /// Carrying more of the deployment never costs less.
    #[test]
    fn player_costs_grow_with_share(a in 0.05f64..0.95, b in 0.05f64..0.95) {
        let cfg = fixtures::lunar_nominal();
        let player = cfg.commercial_indices()[0];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s = settings();
        let jl = player_cost(&cfg, player, lo, 4, &s).unwrap().value;
        let jh = player_cost(&cfg, player, hi, 4, &s).unwrap().value;
        prop_assert!(jl <= jh + 1e-6 * jh.max(1.0), "J({lo}) = {jl} > J({hi}) = {jh}");
    }
}

#[test]
fn holdover_arcs_exist_in_the_nominal_network() {
    let cfg = fixtures::lunar_nominal();
    let run = baseline_run(&cfg, &settings()).unwrap();
    assert!(run.formulation.networks[0].edges.iter().any(|e| e.kind == ArcKind::Holdover));
    assert!(run.formulation.networks[0].edges.iter().any(|e| e.kind == ArcKind::Transport));
}
