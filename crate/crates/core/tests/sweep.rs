mod common;

use spacelog::formulation::CostSettings;
use spacelog::game::CurveSet;
use spacelog::model::fixtures;
use spacelog::sweep::{
    multi_player_grid, run_sweep, sweep_json, write_sweep_csv, Axis, AxisVariable, SweepBase, SweepMode, SweepResult, SweepSpec,
};
use spacelog::Error;

fn csv_of(r: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, r).unwrap();
    String::from_utf8(buf).unwrap()
}

fn contour(step: f64) -> SweepSpec {
    SweepSpec::new(vec![
        Axis::range(AxisVariable::Alpha, None, 0.0, 1.0, step),
        Axis::range(AxisVariable::Theta, None, 0.0, 1.5, step),
    ])
}

#[test]
fn grid_is_row_major_and_skips_oversubscribed_points() {
    let set = CurveSet::linear(100.0, &[60.0, 70.0]);
    let spec = SweepSpec::new(vec![
        Axis::range(AxisVariable::Alpha, Some(1), 0.0, 1.0, 0.25),
        Axis::range(AxisVariable::Alpha, Some(2), 0.0, 1.0, 0.25),
    ]);
    let r = run_sweep(SweepBase::Curves(&set), &spec, 2).unwrap();
    assert_eq!(r.records.len(), 15);
    assert!(r.records.iter().all(|p| p.axes[0] + p.axes[1] <= 1.0));
    assert_eq!(r.records[0].axes, vec![0.0, 0.0]);
    assert_eq!(r.records[1].axes, vec![0.0, 0.25]);
    assert_eq!(r.records.last().unwrap().axes, vec![1.0, 0.0]);
    assert_eq!(r.axis_names, vec!["alpha_1", "alpha_2"]);
}

#[test]
fn rows_satisfy_accounting_identities() {
    for seed in 0..10 {
        let set = common::random_instance(seed, 1);
        let r = run_sweep(SweepBase::Curves(&set), &contour(0.1), 1).unwrap();
        for p in r.records.iter().filter(|p| p.error.is_none()) {
            let q = p.baseline;
            let tol = 1e-9 * q;
            assert!((p.expense - (p.j_o + p.incentive_paid)).abs() <= tol);
            assert!((p.u_o - (q - p.expense)).abs() <= tol);
            assert!((p.u_o + p.u_p.iter().sum::<f64>() - p.welfare).abs() <= tol);
            assert!((p.incentive_paid - p.alpha[0] * p.theta[0] * q).abs() <= tol);
            if p.feasible {
                assert!(p.u_o >= -tol && p.u_p.iter().all(|&u| u >= -tol));
            }
        }
    }
}

#[test]
fn parallel_runs_match_serial_runs() {
    let set = common::random_instance(7, 2);
    let spec = SweepSpec::new(vec![
        Axis::range(AxisVariable::Alpha, Some(1), 0.0, 1.0, 0.1),
        Axis::range(AxisVariable::Alpha, Some(2), 0.0, 1.0, 0.1),
    ]);
    let a = run_sweep(SweepBase::Curves(&set), &spec, 1).unwrap();
    let b = run_sweep(SweepBase::Curves(&set), &spec, 4).unwrap();
    assert_eq!(csv_of(&a), csv_of(&b));
    assert_eq!(sweep_json(&a, &[]), sweep_json(&b, &[]));
}

#[test]
fn cached_and_uncached_model_sweeps_agree() {
    let cfg = fixtures::lunar_nominal();
    let settings = CostSettings::default();
    let mut spec = SweepSpec::new(vec![
        Axis::list(AxisVariable::Alpha, None, vec![0.5, 1.0]),
        Axis::list(AxisVariable::Theta, None, vec![0.8, 0.9]),
    ]);
    let cached = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, 1).unwrap();
    spec.cache = false;
    let fresh = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, 1).unwrap();
    assert_eq!(csv_of(&cached), csv_of(&fresh));
    // two participation levels, each pricing both players once, plus the repeats when uncached
    assert!(cached.solves < fresh.solves, "{} vs {}", cached.solves, fresh.solves);
}

#[test]
fn symmetric_players_give_mirrored_grids() {
    let set = CurveSet::linear(100.0, &[60.0, 60.0]);
    let grid = multi_player_grid(SweepBase::Curves(&set), 0.1, 1).unwrap();
    for p in &grid.sweep.records {
        let mirror = grid.sweep.records.iter().find(|m| m.axes[0] == p.axes[1] && m.axes[1] == p.axes[0]).unwrap();
        assert_eq!(p.feasible, mirror.feasible);
        assert!((p.welfare - mirror.welfare).abs() < 1e-9);
        assert_eq!(p.nash_product.is_some(), mirror.nash_product.is_some());
        if let (Some(a), Some(b)) = (p.nash_product, mirror.nash_product) {
            assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }
    for (a, b) in grid.best_alpha1.iter().zip(&grid.best_alpha2) {
        assert_eq!(a.best, b.best);
    }
}

#[test]
fn structural_axes_rebuild_the_model() {
    let cfg = fixtures::lunar_nominal();
    let settings = CostSettings::default();
    let mut spec = SweepSpec::new(vec![Axis::list(AxisVariable::PlantMass, Some(1), vec![0.0, 10_000.0])]);
    spec.alpha = vec![1.0];
    let r = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, 1).unwrap();
    assert_eq!(r.records.len(), 2);
    // a plant makes the player cheaper
    assert!(r.records[1].j_p[0] < r.records[0].j_p[0]);
    assert!(r.records[1].welfare > r.records[0].welfare);

    // an infeasible structure is reported in its row, not as a failure of the sweep
    let mut spec = SweepSpec::new(vec![Axis::list(AxisVariable::Demand, None, vec![30_000.0, 200_000.0])]);
    spec.alpha = vec![1.0];
    let r = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, 1).unwrap();
    assert!(r.records[0].error.is_none());
    assert!(r.records[1].error.is_some() && !r.records[1].feasible);
    let csv = csv_of(&r);
    assert!(csv.lines().nth(2).unwrap().starts_with("200000,false,"));
}

#[test]
fn scenario1_sweeps_choose_both_coefficients() {
    let cfg = fixtures::lunar_nominal();
    let settings = CostSettings::default();
    let mut spec = SweepSpec::new(vec![Axis::list(AxisVariable::PlantMass, Some(1), vec![10_000.0])]);
    spec.mode = Some(SweepMode::Scenario1);
    spec.resolution = 0.25;
    let r = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, 1).unwrap();
    let p = &r.records[0];
    assert!(p.feasible);
    assert_eq!(p.alpha, vec![1.0]);
    assert!((p.u_o - p.u_p[0]).abs() <= 1e-6 * p.baseline);
}

#[test]
fn curves_reject_structural_axes() {
    let set = CurveSet::linear(100.0, &[60.0]);
    let spec = SweepSpec::new(vec![Axis::list(AxisVariable::Demand, None, vec![1.0])]);
    assert!(matches!(run_sweep(SweepBase::Curves(&set), &spec, 1), Err(Error::Argument(_))));
}

#[test]
fn json_keeps_requested_quantities() {
    let set = CurveSet::linear(100.0, &[60.0]);
    let r = run_sweep(SweepBase::Curves(&set), &contour(0.5), 1).unwrap();
    let all = sweep_json(&r, &[]);
    let some = sweep_json(&r, &["welfare".to_string()]);
    let row_all = &all["records"][0];
    let row_some = &some["records"][0];
    assert!(row_all.get("nash_product").is_some());
    assert!(row_some.get("welfare").is_some());
    assert!(row_some.get("nash_product").is_none());
}
