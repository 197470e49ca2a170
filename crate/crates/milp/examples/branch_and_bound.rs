//! A small capital-budgeting MILP: the relaxation bound, the integer
//! optimum, the search statistics and the model in LP format.

use spacelog_milp::{check_solution, dual_bound, solve_milp, to_lp_string, LinearExpr, MilpProblem, Relation, Sense, SolverOptions};

fn main() -> Result<(), spacelog_milp::MilpError> {
    let mut p = MilpProblem::new(Sense::Maximize).named("budget");
    let value = [9.0, 5.0, 6.0, 4.0];
    let cost = [6.0, 3.0, 5.0, 2.0];
    let x: Vec<_> = (0..4).map(|i| p.add_integer(format!("project{i}"), Some(1.0))).collect();
    p.objective = x.iter().zip(value).fold(LinearExpr::new(), |e, (&v, c)| e.with(v, c));
    let spend = x.iter().zip(cost).fold(LinearExpr::new(), |e, (&v, c)| e.with(v, c));
    p.add_constraint("budget", spend, Relation::Le, 10.0);
    // at most two projects, and project 2 only together with project 0
    p.add_constraint("count", x.iter().fold(LinearExpr::new(), |e, &v| e.with(v, 1.0)), Relation::Le, 2.0);
    p.add_constraint("link", LinearExpr::new().with(x[2], 1.0).with(x[0], -1.0), Relation::Le, 0.0);

    print!("{}", to_lp_string(&p));
    println!("relaxation bound {:.3}", dual_bound(&p)?);
    let sol = solve_milp(&p, &SolverOptions::default())?;
    println!("status {:?}, objective {}", sol.status, sol.objective_value);
    println!("chosen {:?}", sol.values);
    println!("{} nodes, {} LP iterations", sol.stats.nodes, sol.stats.lp_iterations);
    println!("feasible: {}", check_solution(&p, &sol));
    Ok(())
}
