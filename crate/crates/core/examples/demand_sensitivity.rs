//! How the bargained participation level moves as the deployment demand
//! grows, with every player flying two spacecraft per mission.

use spacelog::formulation::CostSettings;
use spacelog::game::SearchOptions;
use spacelog::model::fixtures;
use spacelog::sweep::demand_sensitivity;

fn main() -> Result<(), spacelog::Error> {
    let mut cfg = fixtures::lunar_nominal();
    for p in &mut cfg.players {
        p.baseline_fleet = Some(p.fleet_per_mission);
        p.fleet_per_mission = 2;
    }
    let demands: Vec<f64> = (0..6).map(|i| 20_000.0 + 16_000.0 * i as f64).collect();
    let levels = demand_sensitivity(&cfg, &demands, &CostSettings::default(), &SearchOptions::default().with_resolution(0.02))?;
    for l in &levels {
        match (&l.design, l.feasible_interval()) {
            (Some(d), Some((lo, hi))) => println!(
                "{:>5.0} t: Q ${:.0}M, alpha* {:.3}, welfare ${:.1}M, feasible alpha [{lo:.2}, {hi:.2}]",
                l.demand / 1e3,
                l.baseline.unwrap() / 1e6,
                d.alpha()[0],
                d.point.welfare / 1e6
            ),
            _ => println!("{:>5.0} t: {}", l.demand / 1e3, l.note.as_deref().unwrap_or("no design")),
        }
    }
    Ok(())
}
