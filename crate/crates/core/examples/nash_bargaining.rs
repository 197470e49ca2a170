//! Scenario 1 on the two-player lunar scenario: the joint model picks the
//! participation level, incentives split the surplus equally.

use spacelog::formulation::CostSettings;
use spacelog::game::{solve_scenario1_joint, MilpCostEvaluator, SearchOptions};
use spacelog::model::fixtures;

fn main() -> Result<(), spacelog::Error> {
    let start = std::time::Instant::now();
    let eval = MilpCostEvaluator::new(fixtures::lunar_nominal(), CostSettings::default())?;
    println!("Q = ${:.1}M", spacelog::game::CostSource::baseline(&eval) / 1e6);
    let (design, run) = solve_scenario1_joint(&eval, &SearchOptions::default())?;
    let p = &design.point;
    println!("alpha = {:?}, theta = {:?}", p.alpha, p.theta);
    println!("u_o = ${:.1}M, u_p = {:?}", p.u_o / 1e6, p.u_p.iter().map(|u| (u / 1e6 * 10.0).round() / 10.0).collect::<Vec<_>>());
    println!("welfare ${:.1}M, joint model {} nodes", p.welfare / 1e6, run.solution.stats.nodes);
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
