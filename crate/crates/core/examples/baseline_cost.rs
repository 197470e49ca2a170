//! Baseline cost of the bundled two-player lunar scenario: the coordinator
//! delivers the whole deployment alone.

use spacelog::formulation::{baseline_run, verify_solution, CostComponent, CostSettings};
use spacelog::model::fixtures;

fn main() -> Result<(), spacelog::Error> {
    let cfg = fixtures::lunar_nominal();
    let start = std::time::Instant::now();
    let run = baseline_run(&cfg, &CostSettings::default())?;
    let cost = run.attribution();
    println!("status      {:?}", run.solution.status);
    println!("Q           ${:.1}M", cost.total / 1e6);
    for c in CostComponent::ALL {
        println!("  {:<10} ${:.1}M", c.label(), cost.component(c) / 1e6);
    }
    let p = &run.formulation.problem;
    println!("model       {} vars ({} integer), {} rows", p.num_vars(), p.num_integers(), p.num_constraints());
    println!("search      {} nodes, {} LP iterations", run.solution.stats.nodes, run.solution.stats.lp_iterations);
    println!("violations  {}", verify_solution(&cfg, &run.formulation, &run.solution.values).len());
    println!("elapsed     {:.2?}", start.elapsed());
    Ok(())
}
