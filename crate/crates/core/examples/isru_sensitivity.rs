//! Width of the feasible incentive range against participation, for
//! several ISRU plant sizes of the commercial player.

use spacelog::formulation::CostSettings;
use spacelog::model::fixtures;
use spacelog::sweep::isru_sensitivity;

fn main() -> Result<(), spacelog::Error> {
    let cfg = fixtures::lunar_nominal();
    let alphas: Vec<f64> = (2..=10).map(|i| i as f64 / 10.0).collect();
    let masses = [0.0, 5_000.0, 10_000.0, 20_000.0];
    let levels = isru_sensitivity(&cfg, 1, &masses, &alphas, &CostSettings::default(), spacelog::default_workers())?;
    print!("{:>8}", "plant t");
    for a in &alphas {
        print!("{a:>8.1}");
    }
    println!();
    for l in &levels {
        print!("{:>8.0}", l.plant_mass / 1e3);
        for r in &l.rows {
            match r.interval {
                Some(_) => print!("{:>8.3}", r.width()),
                None => print!("{:>8}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
