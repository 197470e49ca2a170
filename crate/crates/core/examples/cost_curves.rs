//! Samples both players' incremental cost curves from the network model,
//! writes them as CSV and reloads them as a curve set for the analytical
//! route.

use spacelog::formulation::CostSettings;
use spacelog::game::{cost_curve_from_milp, CostCurve, CostSource, CurveSet, CurveSource, MilpCostEvaluator};
use spacelog::model::fixtures;

fn main() -> Result<(), spacelog::Error> {
    let eval = MilpCostEvaluator::new(fixtures::lunar_nominal(), CostSettings::default())?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let workers = spacelog::default_workers();
    let coordinator = cost_curve_from_milp(&eval, 0, &grid, workers)?;
    let player = cost_curve_from_milp(&eval, 1, &grid, workers)?;

    println!("{:>6}{:>14}{:>14}", "share", "J_o $M", "J_p $M");
    for (o, p) in coordinator.samples.iter().zip(&player.samples) {
        println!("{:>6.1}{:>14.1}{:>14.1}", o.alpha, o.cost / 1e6, p.cost / 1e6);
    }

    let dir = std::env::temp_dir();
    coordinator.write_csv_file(dir.join("coordinator.csv"))?;
    player.write_csv_file(dir.join("lunar-isru.csv"))?;
    let reloaded = CostCurve::read_csv_file("lunar-isru", dir.join("lunar-isru.csv"))?;
    assert_eq!(reloaded.source, CurveSource::UserSupplied);

    let set = CurveSet::new(eval.baseline(), coordinator, vec![reloaded]);
    let text = set.to_toml_string();
    let back = CurveSet::from_toml_str(&text)?;
    // the curve set interpolates between samples
    println!("J_p(0.55) from curves: ${:.1}M", back.cost(1, 0.55)? / 1e6);
    println!("J_p(0.55) from model:  ${:.1}M", eval.cost(1, 0.55)? / 1e6);
    Ok(())
}
