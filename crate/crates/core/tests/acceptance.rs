//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one PASS or FAIL line.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacelog::formulation::{
    all_participants, baseline_run, solve_mission, verify_solution, AlphaSpec, CostSettings, ObjectiveMode,
};
use spacelog::game::{
    design_costs, feasible_theta_interval, maximin_value, omega_contains_costs, solve_scenario1, solve_scenario1_joint,
    solve_scenario2, solve_scenario3, theta_star_from_costs, welfare_from_costs, CostSource, CurveSet, MilpCostEvaluator,
    SearchOptions, UtilityPoint,
};
use spacelog::model::fixtures;
use spacelog::physics::isru_yield;
use spacelog::sweep::{demand_sensitivity, isru_sensitivity};
use spacelog_milp::{check_solution, relax, solve_lp, solve_milp, LinearExpr, MilpProblem, Relation, Sense, SolverOptions, Status, VarId};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: spacelog::Error) -> String {
    e.to_string()
}

fn opts(resolution: f64) -> SearchOptions {
    SearchOptions::default().with_resolution(resolution)
}

fn nominal_eval() -> MilpCostEvaluator {
    MilpCostEvaluator::new(fixtures::lunar_nominal(), CostSettings::default()).expect("nominal scenario is feasible")
}

fn baseline_cost_check() -> Outcome {
    let out = std::env::temp_dir().join(format!("spacelog-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&out);
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/lunar_nominal.toml");
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_spacelog"))
        .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "baseline"])
        .env_remove("SPACELOG_CONFIG")
        .env_remove("SPACELOG_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(o.status.success(), || format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))?;
    let read = |name: &str| -> Result<serde_json::Value, String> {
        let text = std::fs::read_to_string(out.join(name)).map_err(|e| e.to_string())?;
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    let report = read("baseline.json")?;
    let manifest = read("manifest.json")?;
    let q = report["baseline"].as_f64().ok_or("no baseline in report")?;
    let target = 2_058e6;
    ensure((q - target).abs() <= 0.10 * target, || format!("Q = {q:.4e} is {:+.1}% off", 100.0 * (q / target - 1.0)))?;
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    let defaults = manifest["assumed_defaults"].as_object().ok_or("manifest lacks assumed defaults")?;
    ensure(defaults.contains_key("spacecraft.tanker.payload_capacity"), || "manifest does not record the payload capacity".into())?;
    ensure(report["violations"].as_array().is_some_and(|v| v.is_empty()), || "baseline flows fail the physics checks".into())?;
    Ok(format!(
        "Q = ${:.1}M ({:+.1}% of $2,058M) in {secs:.1} s, {} assumed defaults recorded",
        q / 1e6,
        100.0 * (q / target - 1.0),
        defaults.len()
    ))
}

fn nominal_optimum_check(eval: &MilpCostEvaluator) -> Outcome {
    let q = eval.baseline();
    let lattice = solve_scenario1(eval, &opts(0.01)).map_err(err)?;
    let (joint, run) = solve_scenario1_joint(eval, &opts(0.01)).map_err(err)?;
    ensure(run.is_optimal(), || "joint solve not optimal".into())?;
    for (route, d) in [("lattice", &lattice), ("joint", &joint)] {
        let a = d.alpha()[0];
        ensure((a - 1.0).abs() <= 0.01 + 1e-12, || format!("{route} search gives alpha {a}"))?;
        let u = d.point.utilities();
        let spread = u.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) - u.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        ensure(spread <= 1e-6 * q, || format!("{route} utilities {u:?} differ by {spread}"))?;
    }
    Ok(format!(
        "alpha* = {} (lattice), {} (joint); utilities ${:.1}M each",
        lattice.alpha()[0],
        joint.alpha()[0],
        lattice.point.u_o / 1e6
    ))
}

fn feasibility_threshold_check(eval: &MilpCostEvaluator) -> Outcome {
    let q = eval.baseline();
    let interval = |a: f64| -> Result<Option<(f64, f64)>, String> {
        let costs = design_costs(eval, &[a]).map_err(err)?;
        Ok(feasible_theta_interval(q, &costs, &[a], 1))
    };
    let mut first_open = None;
    for i in 0..=20 {
        let a = i as f64 / 20.0;
        let iv = interval(a)?;
        if a <= 0.4 + 1e-12 {
            ensure(iv.is_none(), || format!("alpha {a} has feasible incentives {iv:?}"))?;
        }
        if a >= 0.6 - 1e-12 {
            ensure(iv.is_some(), || format!("alpha {a} has no feasible incentive"))?;
        }
        if iv.is_some() && first_open.is_none() {
            first_open = Some(a);
        }
    }
    let open = first_open.ok_or("no feasible alpha")?;
    Ok(format!("empty up to alpha 0.40, nonempty from alpha {open:.2} on a 0.05 grid"))
}

fn demand_trend_check() -> Outcome {
    let mut cfg = fixtures::lunar_nominal();
    for p in &mut cfg.players {
        p.baseline_fleet = Some(p.fleet_per_mission);
        p.fleet_per_mission = 2;
    }
    let demands: Vec<f64> = (0..6).map(|i| 20_000.0 + 16_000.0 * i as f64).collect();
    let levels = demand_sensitivity(&cfg, &demands, &CostSettings::default(), &opts(0.02)).map_err(err)?;
    let first = levels[0].alpha_star().ok_or("no design at 20 t")?[0];
    ensure((first - 1.0).abs() <= 0.02 + 1e-12, || format!("alpha* = {first} at 20 t"))?;
    let last = levels.iter().rev().find(|l| l.is_feasible()).ok_or("no feasible level")?;
    let a = last.alpha_star().unwrap()[0];
    ensure((0.45..=0.6).contains(&a), || format!("alpha* = {a} at {} t", last.demand / 1e3))?;
    Ok(format!("alpha* = {first} at 20 t, {a:.3} at {:.0} t (largest feasible)", last.demand / 1e3))
}

fn isru_width_check() -> Outcome {
    let cfg = fixtures::lunar_nominal();
    let masses = [0.0, 5_000.0, 10_000.0, 20_000.0];
    let levels = isru_sensitivity(&cfg, 1, &masses, &[1.0], &CostSettings::default(), spacelog::default_workers()).map_err(err)?;
    let widths: Vec<f64> = levels.iter().map(|l| l.width_at(1.0)).collect();
    ensure(widths.windows(2).all(|w| w[1] >= w[0] - 1e-9), || format!("widths {widths:?}"))?;
    let shown: Vec<String> = widths.iter().map(|w| format!("{w:.3}")).collect();
    Ok(format!("widths at alpha 1 for 0/5/10/20 t plants: {}", shown.join(", ")))
}

/// Brute-force grid for the bargaining checks: participation step and
/// incentive step per number of commercial players.
fn brute_grid(k: usize) -> (usize, f64) {
    match k {
        1 => (100, 0.01),
        2 => (20, 0.01),
        _ => (10, 0.05),
    }
}

const THETA_MAX: f64 = 2.0;

struct GridScan {
    best_product: f64,
    best_floor: f64,
    points: u64,
}

/// Largest Nash product and largest smallest utility over feasible grid
/// designs.
fn scan_grid(set: &CurveSet) -> GridScan {
    let k = set.num_commercial();
    let q = set.baseline();
    let tol = 1e-9 * q;
    let (a_steps, t_step) = brute_grid(k);
    let t_count = (THETA_MAX / t_step).round() as usize + 1;
    let mut scan = GridScan { best_product: 0.0, best_floor: f64::NEG_INFINITY, points: 0 };
    for alpha in spacelog::game::simplex_lattice(k, a_steps) {
        let costs = design_costs(set, &alpha).unwrap();
        let mut idx = vec![0usize; k];
        loop {
            let mut paid = 0.0;
            let mut prod = 1.0;
            let mut floor = f64::INFINITY;
            let mut feasible = true;
            for j in 0..k {
                let pay = alpha[j] * (idx[j] as f64 * t_step) * q;
                paid += pay;
                let u = pay - costs[j + 1];
                feasible &= u >= -tol;
                prod *= u.max(0.0);
                floor = floor.min(u);
            }
            let u_o = q - costs[0] - paid;
            feasible &= u_o >= -tol;
            scan.points += 1;
            if feasible {
                prod *= u_o.max(0.0);
                floor = floor.min(u_o);
                scan.best_product = scan.best_product.max(prod);
                scan.best_floor = scan.best_floor.max(floor);
            }
            let mut j = 0;
            while j < k && idx[j] + 1 == t_count {
                idx[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
            idx[j] += 1;
        }
    }
    scan
}

fn instance(seed: u64) -> CurveSet {
    common::random_instance(seed, 1 + (seed % 3) as usize)
}

fn bargaining_checks() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut designs = 0;
    let mut points = 0u64;
    let mut maximin_fail = None;
    let mut run = || -> Result<(), String> {
        for seed in 0..200u64 {
            let set = instance(seed);
            let k = set.num_commercial();
            let q = set.baseline();
            let r = set.disagreement();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);

            // equal split and budget balance at random designs
            for _ in 0..20 {
                let alpha = common::random_alpha(&mut rng, k);
                let costs = design_costs(&set, &alpha).map_err(err)?;
                let u = welfare_from_costs(q, &costs);
                match theta_star_from_costs(q, &costs, &alpha, &r) {
                    Some(theta) => {
                        let p = UtilityPoint::from_costs(q, costs.clone(), &alpha, &theta, &r);
                        let share = u / (k + 1) as f64;
                        for v in p.utilities() {
                            ensure((v - share).abs() <= 1e-9 * q, || format!("seed {seed}: utility {v} vs share {share}"))?;
                        }
                        ensure(omega_contains_costs(q, &costs, &alpha, &theta), || format!("seed {seed}: equal split outside the domain"))?;
                    }
                    None => ensure(u < 0.0, || format!("seed {seed}: no equal split at welfare {u}"))?,
                }
                for _ in 0..5 {
                    let theta: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..THETA_MAX)).collect();
                    let p = UtilityPoint::from_costs(q, costs.clone(), &alpha, &theta, &r);
                    let sum: f64 = p.utilities().iter().sum();
                    ensure((sum - u).abs() <= 1e-12 * q, || format!("seed {seed}: utilities sum to {sum}, welfare {u}"))?;
                }
            }

            // the bargaining design against a brute-force grid
            let Ok(nbs) = solve_scenario1(&set, &opts(0.01).with_workers(1)) else { continue };
            designs += 1;
            let best = nbs.point.nash_product.unwrap_or(0.0);
            let scan = scan_grid(&set);
            points += scan.points;
            let slack = 1e-9 * q.powi(k as i32 + 1);
            ensure(scan.best_product <= best + slack, || {
                format!("seed {seed}: grid product {:.6e} beats the design's {best:.6e}", scan.best_product)
            })?;
            let floor = maximin_value(&nbs.point);
            if scan.best_floor > floor + 1e-9 * q && maximin_fail.is_none() {
                maximin_fail = Some(format!("seed {seed}: grid floor {} beats the design's {floor}", scan.best_floor));
            }
        }
        Ok(())
    };
    let result = run();
    let secs = start.elapsed().as_secs_f64();
    let product = result.clone().and_then(|()| {
        ensure(secs <= 120.0, || format!("took {secs:.1} s"))?;
        Ok(format!("200 instances, {designs} bargaining designs, {points} grid designs, {secs:.1} s"))
    });
    let floor = result.and_then(|()| match maximin_fail {
        Some(m) => Err(m),
        None => Ok(format!("no feasible grid design beats the bargaining design's smallest utility on {designs} instances")),
    });
    (product, floor)
}

/// Random pure-integer problem. Most are built around a lattice point so
/// that they are feasible; one in five gets free right-hand sides.
fn random_milp(rng: &mut ChaCha8Rng) -> MilpProblem {
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let mut p = MilpProblem::new(sense);
    let n = rng.gen_range(1..=6);
    let ubs: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=10)).collect();
    for (j, &ub) in ubs.iter().enumerate() {
        p.add_integer(format!("x{j}"), Some(ub as f64));
    }
    for j in 0..n {
        p.objective.add_term(VarId(j), rng.gen_range(-6..=6) as f64);
    }
    let anchor: Option<Vec<i64>> = rng.gen_bool(0.8).then(|| ubs.iter().map(|&u| rng.gen_range(0..=u)).collect());
    for i in 0..rng.gen_range(1..=5) {
        let mut e = LinearExpr::new();
        let mut at_anchor = 0;
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let c = rng.gen_range(-5..=5);
                e.add_term(VarId(j), c as f64);
                at_anchor += c * anchor.as_ref().map_or(0, |a| a[j]);
            }
        }
        let rel = match rng.gen_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = match (&anchor, rel) {
            (None, _) => rng.gen_range(-10..=30),
            (Some(_), Relation::Eq) => at_anchor,
            (Some(_), Relation::Ge) => at_anchor - rng.gen_range(0..=8),
            (Some(_), Relation::Le) => at_anchor + rng.gen_range(0..=8),
        };
        p.add_constraint(format!("r{i}"), e, rel, rhs as f64);
    }
    p
}

fn enumerate(p: &MilpProblem) -> Option<f64> {
    let ubs: Vec<i64> = p.variables.iter().map(|v| v.upper.unwrap() as i64).collect();
    let mut x = vec![0i64; ubs.len()];
    let mut best: Option<f64> = None;
    let sign = p.sense.sign();
    loop {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        if p.constraints.iter().all(|c| c.violation(&xf) == 0.0) {
            let v = p.objective_value(&xf);
            if best.is_none_or(|b| sign * v < sign * b) {
                best = Some(v);
            }
        }
        let mut j = 0;
        while j < x.len() && x[j] == ubs[j] {
            x[j] = 0;
            j += 1;
        }
        if j == x.len() {
            return best;
        }
        x[j] += 1;
    }
}

fn milp_oracle_check() -> Outcome {
    let mut feasible = 0;
    for seed in 0..100u64 {
        let p = random_milp(&mut ChaCha8Rng::seed_from_u64(seed));
        let sol = solve_milp(&p, &SolverOptions::default()).map_err(|e| e.to_string())?;
        match enumerate(&p) {
            None => ensure(sol.status == Status::Infeasible, || format!("seed {seed}: {:?} on an infeasible problem", sol.status))?,
            Some(best) => {
                feasible += 1;
                ensure(sol.status == Status::Optimal, || format!("seed {seed}: status {:?}", sol.status))?;
                ensure((sol.objective_value - best).abs() <= 1e-9, || format!("seed {seed}: {} vs {best}", sol.objective_value))?;
                ensure(check_solution(&p, &sol), || format!("seed {seed}: solution fails its own problem"))?;
                let lp = solve_lp(&relax(&p)).map_err(|e| e.to_string())?;
                let sign = p.sense.sign();
                ensure(lp.status == Status::Optimal && sign * lp.objective_value <= sign * best + 1e-9, || {
                    format!("seed {seed}: relaxation {} does not bound {best}", lp.objective_value)
                })?;
            }
        }
    }
    Ok(format!("100 problems, {feasible} feasible, all optimal values match enumeration"))
}

fn physics_check(eval: &MilpCostEvaluator) -> Outcome {
    let usable = isru_yield(10_000.0, 365.0, 5.0, 5.5).usable_propellant();
    let oracle = 10_000.0 * 5.0 / 9.0 * (1.0 + 5.5);
    ensure((usable - oracle).abs() <= 1e-6 * oracle && (usable - 36_111.0).abs() < 1.0, || format!("plant yields {usable} kg/yr"))?;

    let settings = CostSettings::default();
    let base = fixtures::lunar_nominal();
    let mut runs = vec![("baseline", base.clone(), baseline_run(&base, &settings).map_err(err)?)];
    runs.push(("joint bargaining", base.clone(), solve_scenario1_joint(eval, &opts(0.01)).map_err(err)?.1));
    for plant in [5_000.0, 10_000.0, 20_000.0] {
        let mut cfg = base.clone();
        let player = cfg.commercial_indices()[0];
        cfg.players[player].isru_plant_mass = plant;
        let parts = all_participants(&cfg);
        let run = solve_mission(&cfg, &parts, &AlphaSpec::Fixed(vec![1.0]), ObjectiveMode::MinTotalCost, &settings).map_err(err)?;
        runs.push(("ISRU", cfg, run));
    }
    for (name, cfg, run) in &runs {
        ensure(run.is_optimal(), || format!("{name} run not optimal"))?;
        let v = verify_solution(cfg, &run.formulation, &run.solution.values);
        ensure(v.is_empty(), || format!("{name} run: {} violations, first {}: {}", v.len(), v[0].what, v[0].detail))?;
    }

    let q = eval.baseline();
    for z in 0..=eval.num_commercial() {
        let mut last = 0.0;
        for i in 0..=50 {
            let a = i as f64 / 50.0;
            let j = eval.cost(z, a).map_err(err)?;
            ensure(j >= last - 1e-6 * q, || format!("seat {z}: J({a}) = {j} below {last}"))?;
            last = j;
        }
    }
    Ok(format!("{usable:.1} kg/yr per 10 t plant; {} optimal runs pass the flow checks; J monotone on 51 points", runs.len()))
}

fn cross_check(name: &str, src: &(impl CostSource + ?Sized), resolution: f64) -> Result<bool, String> {
    let Ok(nbs) = solve_scenario1(src, &opts(resolution)) else { return Ok(false) };
    let s2 = solve_scenario2(src, nbs.alpha()).map_err(err)?;
    ensure(s2.theta() == nbs.theta(), || format!("{name}: incentives {:?} vs {:?}", s2.theta(), nbs.theta()))?;
    let s3 = solve_scenario3(src, nbs.theta(), &opts(resolution)).map_err(err)?;
    let near = s3.alpha().iter().zip(nbs.alpha()).all(|(x, y)| (x - y).abs() <= resolution + 1e-9);
    ensure(near, || format!("{name}: participation {:?} vs {:?}", s3.alpha(), nbs.alpha()))?;
    Ok(true)
}

fn consistency_check(eval: &MilpCostEvaluator) -> Outcome {
    cross_check("nominal", eval, 0.01)?;
    let mut checked = 0;
    for seed in 0..20u64 {
        let set = common::random_instance(10_000 + seed, 1 + (seed % 2) as usize);
        if cross_check(&format!("seed {seed}"), &set, 0.01)? {
            checked += 1;
        }
    }
    Ok(format!("nominal and {checked} of 20 random instances with a bargaining design agree"))
}

fn main() {
    // optional substring filters, as with the default harness
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filters.is_empty() || filters.iter().any(|f| name.contains(f.as_str()));
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {name}: {detail}");
        }
    };
    if wanted("baseline cost") {
        report("baseline cost", baseline_cost_check());
    }
    let eval = nominal_eval();
    if wanted("nominal optimum") {
        report("nominal optimum", nominal_optimum_check(&eval));
    }
    if wanted("feasibility threshold") {
        report("feasibility threshold", feasibility_threshold_check(&eval));
    }
    if wanted("demand trend") {
        report("demand trend", demand_trend_check());
    }
    if wanted("ISRU width trend") {
        report("ISRU width trend", isru_width_check());
    }
    if wanted("bargaining design") {
        let (product, floor) = bargaining_checks();
        report("bargaining design maximises the Nash product", product);
        report("bargaining design maximises the smallest utility", floor);
    }
    if wanted("MILP oracle") {
        report("MILP oracle", milp_oracle_check());
    }
    if wanted("flow physics") {
        report("flow physics and cost monotonicity", physics_check(&eval));
    }
    if wanted("scenario cross-consistency") {
        report("scenario cross-consistency", consistency_check(&eval));
    }
    println!("acceptance: {failed} failed, {:.1} s", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
