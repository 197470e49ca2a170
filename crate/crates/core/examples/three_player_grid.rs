//! Two commercial players: Nash product over both participation levels
//! with surplus-splitting incentives, and each player's best response.

use spacelog::formulation::CostSettings;
use spacelog::model::fixtures;
use spacelog::sweep::{multi_player_grid, SweepBase};

fn main() -> Result<(), spacelog::Error> {
    let cfg = fixtures::lunar_three_player();
    let settings = CostSettings::default();
    let grid = multi_player_grid(SweepBase::Model { cfg: &cfg, settings: &settings }, 0.1, spacelog::default_workers())?;
    let feasible = grid.sweep.records.iter().filter(|r| r.feasible).count();
    println!("{} designs, {} feasible, {} solver runs", grid.sweep.records.len(), feasible, grid.sweep.solves);
    println!("{:>8}{:>12}{:>12}", "given", "best a1", "best a2");
    for (b1, b2) in grid.best_alpha1.iter().zip(&grid.best_alpha2) {
        let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.1}"));
        println!("{:>8.1}{:>12}{:>12}", b1.given, show(b1.best), show(b2.best));
    }
    let best = grid.sweep.records.iter().filter(|r| r.feasible).max_by(|a, b| {
        a.nash_product.unwrap_or(0.0).total_cmp(&b.nash_product.unwrap_or(0.0))
    });
    if let Some(b) = best {
        println!("largest Nash product at alpha {:?}, welfare ${:.1}M", b.alpha, b.welfare / 1e6);
    }
    Ok(())
}
