use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spacelog_milp::*;

/// Random pure-integer problem with integer data so optimal values are
/// well separated.
fn random_problem(rng: &mut ChaCha8Rng) -> MilpProblem {
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let mut p = MilpProblem::new(sense);
    let n = rng.gen_range(1..=6);
    let mut cells = 1u64;
    for j in 0..n {
        // keep the lattice enumerable
        let max_ub = if cells > 20_000 { 3 } else { 10 };
        let ub = rng.gen_range(0..=max_ub);
        cells *= ub as u64 + 1;
        p.add_integer(format!("x{j}"), Some(ub as f64));
    }
    let mut obj = LinearExpr::new();
    for j in 0..n {
        obj.add_term(VarId(j), rng.gen_range(-6..=6) as f64);
    }
    p.objective = obj;
    for i in 0..rng.gen_range(0..=5) {
        let mut e = LinearExpr::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                e.add_term(VarId(j), rng.gen_range(-5..=5) as f64);
            }
        }
        let rel = match rng.gen_range(0..6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.gen_range(-10..=30) as f64;
        p.add_constraint(format!("r{i}"), e, rel, rhs);
    }
    p
}

/// Exhaustive enumeration over the integer box.
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
        let mut k = 0;
        loop {
            if k == x.len() {
                return best;
            }
            if x[k] < ubs[k] {
                x[k] += 1;
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_lattice_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let sol = solve_milp(&p, &SolverOptions::default()).unwrap();
        match enumerate(&p) {
            None => prop_assert_eq!(sol.status, Status::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                prop_assert!((sol.objective_value - best).abs() <= 1e-9, "solver {} oracle {}", sol.objective_value, best);
                prop_assert!(check_solution(&p, &sol));
                let lp = solve_lp(&relax(&p)).unwrap();
                prop_assert_eq!(lp.status, Status::Optimal);
                let sign = p.sense.sign();
                prop_assert!(sign * lp.objective_value <= sign * sol.objective_value + 1e-9);
            }
        }
    }

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let a = solve_milp(&p, &SolverOptions::default()).unwrap();
        let b = solve_milp(&p, &SolverOptions::default()).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn continuous_problem_bound_is_tight(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng).relax();
        let lp = solve_lp(&p).unwrap();
        let milp = solve_milp(&p, &SolverOptions::default()).unwrap();
        prop_assert_eq!(lp.status, milp.status);
        if lp.status == Status::Optimal {
            prop_assert!((dual_bound(&p).unwrap() - milp.objective_value).abs() <= 1e-9 * milp.objective_value.abs().max(1.0));
            prop_assert!(check_solution(&p, &milp));
        }
    }
}

#[test]
fn infeasible_relaxation_means_infeasible_milp() {
    let mut p = MilpProblem::new(Sense::Maximize);
    let x = p.add_integer("x", Some(5.0));
    p.add_constraint("lo", LinearExpr::term(x, 1.0), Relation::Ge, 6.0);
    assert_eq!(solve_lp(&relax(&p)).unwrap().status, Status::Infeasible);
    assert_eq!(solve_milp(&p, &SolverOptions::default()).unwrap().status, Status::Infeasible);
}

#[test]
fn integer_gap_instance() {
    // relaxation is feasible, no integer point: 2x = 1
    let mut p = MilpProblem::new(Sense::Minimize);
    let x = p.add_integer("x", Some(3.0));
    p.add_constraint("half", LinearExpr::term(x, 2.0), Relation::Eq, 1.0);
    assert_eq!(solve_lp(&relax(&p)).unwrap().status, Status::Optimal);
    assert_eq!(solve_milp(&p, &SolverOptions::default()).unwrap().status, Status::Infeasible);
}

#[test]
fn node_limit_reports_limit_status() {
    // min sum x subject to a parity-style equality that forces branching
    let mut p = MilpProblem::new(Sense::Minimize);
    let vars: Vec<VarId> = (0..6).map(|j| p.add_integer(format!("x{j}"), Some(10.0))).collect();
    let mut e = LinearExpr::new();
    for &v in &vars {
        e.add_term(v, 2.0);
        p.objective.add_term(v, 1.0);
    }
    p.add_constraint("odd", e, Relation::Eq, 7.0);
    let sol = solve_milp(&p, &SolverOptions::default().with_node_limit(3)).unwrap();
    assert!(matches!(sol.status, Status::LimitReached | Status::Infeasible));
    let full = solve_milp(&p, &SolverOptions::default()).unwrap();
    assert_eq!(full.status, Status::Infeasible);
}
