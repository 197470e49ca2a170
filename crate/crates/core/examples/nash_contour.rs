//! Nash product over participation and incentive for the two-player lunar
//! scenario, written as CSV for contour plots.

use spacelog::formulation::CostSettings;
use spacelog::model::fixtures;
use spacelog::sweep::{run_sweep, write_sweep_csv, SweepBase, SweepSpec};

fn main() -> Result<(), spacelog::Error> {
    let cfg = fixtures::lunar_nominal();
    let settings = CostSettings::default();
    let spec = SweepSpec::from_toml_str(include_str!("../fixtures/nominal_contour.toml"))?;
    let result = run_sweep(SweepBase::Model { cfg: &cfg, settings: &settings }, &spec, spacelog::default_workers())?;

    let path = std::env::temp_dir().join("nominal_contour.csv");
    write_sweep_csv(std::fs::File::create(&path)?, &result)?;
    println!("{} points, {} solver runs, wrote {}", result.records.len(), result.solves, path.display());

    // one row per alpha, one column per theta: '#' feasible, '.' not
    let thetas = spec.axes[1].points()?;
    for alpha_row in result.records.chunks(thetas.len()).rev() {
        let line: String = alpha_row.iter().map(|r| if r.feasible { '#' } else { '.' }).collect();
        println!("alpha {:>4.2} {line}", alpha_row[0].axes[0]);
    }
    println!("           theta 0 .. {}", thetas.last().unwrap());
    Ok(())
}
