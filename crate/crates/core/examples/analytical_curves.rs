//! The game on user-supplied cost curves, without the network model:
//! scenario 1 on a lattice, ties between symmetric players, and a curve
//! set loaded from TOML.

use spacelog::game::{solve_scenario1, CurveSet, SearchOptions};

fn main() -> Result<(), spacelog::Error> {
    let set = CurveSet::from_toml_str(include_str!("../fixtures/linear_curves.toml"))?;
    let d = solve_scenario1(&set, &SearchOptions::default())?;
    println!("one player: alpha {:?}, theta {:?}, welfare {:.2}", d.alpha(), d.theta(), d.point.welfare);

    // two identical players share the deployment in every proportion equally well
    let twins = CurveSet::linear(100.0, &[60.0, 60.0]);
    let d = solve_scenario1(&twins, &SearchOptions::default().with_resolution(0.25))?;
    println!("two players: {} tied designs", d.ties.len());
    for t in &d.ties {
        println!("  alpha {:?} theta {:?}", t.alpha, t.theta.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>());
    }

    // a convex player curve makes partial participation optimal
    let convex = CurveSet::from_toml_str(
        r#"
        baseline = 100.0
        [[curves]]
        player = "coordinator"
        coordinator = true
        alpha = [0.0, 1.0]
        cost = [0.0, 100.0]
        [[curves]]
        player = "convex"
        alpha = [0.0, 0.25, 0.5, 0.75, 1.0]
        cost = [0.0, 10.0, 30.0, 60.0, 110.0]
        "#,
    )?;
    let d = solve_scenario1(&convex, &SearchOptions::default())?;
    println!("convex player: alpha {:.2}, theta {:.4}, utilities {:?}", d.alpha()[0], d.theta()[0], d.point.utilities());
    Ok(())
}
