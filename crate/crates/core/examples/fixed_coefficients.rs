//! Scenarios 2 and 3: the coordinator fixes one coefficient and the other
//! follows. Runs on linear curves and on the network model.

use spacelog::formulation::CostSettings;
use spacelog::game::{solve_scenario2, solve_scenario3, CurveSet, MilpCostEvaluator, SearchOptions};
use spacelog::model::fixtures;

fn main() -> Result<(), spacelog::Error> {
    // Q = 100, the player delivers its share for 60% of the coordinator's cost
    let curves = CurveSet::linear(100.0, &[60.0]);
    let opts = SearchOptions::default();
    for a in [0.25, 0.5, 1.0] {
        let d = solve_scenario2(&curves, &[a])?;
        println!("curves, alpha {a:.2}: theta {:.4}, u_o {:.2}, u_p {:.2}", d.theta()[0], d.point.u_o, d.point.u_p[0]);
    }
    for t in [0.7, 0.8, 0.9] {
        let d = solve_scenario3(&curves, &[t], &opts)?;
        println!("curves, theta {t:.2}: alpha {:.2}, nash product {:.1}", d.alpha()[0], d.point.nash_product.unwrap_or(0.0));
    }

    let eval = MilpCostEvaluator::new(fixtures::lunar_nominal(), CostSettings::default())?;
    let d = solve_scenario2(&eval, &[0.8])?;
    println!("model, alpha 0.80: theta {:.4}, utilities ${:.1}M each", d.theta()[0], d.point.u_o / 1e6);
    let d = solve_scenario3(&eval, &[0.85], &opts.with_resolution(0.05))?;
    println!("model, theta 0.85: alpha {:.2}, welfare ${:.1}M ({} designs evaluated)", d.alpha()[0], d.point.welfare / 1e6, d.evaluations);
    Ok(())
}
