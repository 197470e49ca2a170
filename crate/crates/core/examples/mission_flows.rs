//! Solves the baseline mission, checks the solution against the physics
//! and writes the optimal flows as CSV.

use spacelog::formulation::{baseline_run, flow_records, verify_solution, write_flows_csv, CostSettings};
use spacelog::model::fixtures;

fn main() -> Result<(), spacelog::Error> {
    let cfg = fixtures::lunar_nominal();
    let run = baseline_run(&cfg, &CostSettings::default())?;
    let violations = verify_solution(&cfg, &run.formulation, &run.solution.values);
    println!("mass balance, rocket equation and ISRU checks: {} violations", violations.len());

    let mut flows = flow_records(&cfg, &run.formulation, &run.solution.values);
    flows.retain(|f| f.from != f.to);
    println!("{} nonzero movements", flows.len());
    let path = std::env::temp_dir().join("baseline_flows.csv");
    spacelog::formulation::write_flows_file(&path, &flows)?;
    println!("wrote {}", path.display());
    write_flows_csv(std::io::stdout().lock(), &flows[..flows.len().min(12)])?;
    Ok(())
}
