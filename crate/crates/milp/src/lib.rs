//! Small exact MILP solver: bounded revised simplex for the relaxations and
//! best-bound branch-and-bound with most-fractional branching on top.
//!
//! ```
//! use spacelog_milp::{LinearExpr, MilpProblem, Relation, Sense, SolverOptions, solve_milp};
//!
//! let mut p = MilpProblem::new(Sense::Maximize);
//! let x1 = p.add_integer("x1", None);
//! let x2 = p.add_integer("x2", None);
//! p.objective = LinearExpr::new().with(x1, 5.0).with(x2, 4.0);
//! p.add_constraint("c1", LinearExpr::new().with(x1, 6.0).with(x2, 4.0), Relation::Le, 24.0);
//! p.add_constraint("c2", LinearExpr::new().with(x1, 1.0).with(x2, 2.0), Relation::Le, 6.0);
//!
//! let sol = solve_milp(&p, &SolverOptions::default()).unwrap();
//! assert_eq!(sol.objective_value, 20.0);
//! assert_eq!(sol.values, vec![4.0, 0.0]);
//! ```

mod branch;
mod error;
pub mod lp_format;
mod problem;
mod simplex;
mod solution;

pub use error::MilpError;
pub use lp_format::{to_lp_string, write_lp};
pub use problem::{Constraint, Domain, LinearExpr, MilpProblem, Relation, Sense, VarId, Variable};
pub use solution::{check_solution, check_solution_with, MilpSolution, SolveStats, SolverOptions, Status};

/// Solves the continuous relaxation of `problem` (integrality is ignored).
pub fn solve_lp(problem: &MilpProblem) -> Result<MilpSolution, MilpError> {
    branch::solve_relaxation(problem, &SolverOptions::default())
}

pub fn solve_lp_with(problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError> {
    branch::solve_relaxation(problem, opts)
}

pub fn solve_milp(problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError> {
    branch::branch_and_bound(problem, opts)
}

pub fn relax(problem: &MilpProblem) -> MilpProblem {
    problem.relax()
}

/// Objective of the relaxation: an upper bound on the MILP optimum when
/// maximising, a lower bound when minimising. Infeasible relaxations give
/// NaN and unbounded ones an infinite value, mirroring the LP status.
pub fn dual_bound(problem: &MilpProblem) -> Result<f64, MilpError> {
    Ok(solve_lp(&relax(problem))?.objective_value)
}

/// Anything that can solve a [`MilpProblem`] under the same contract as the
/// embedded solver.
pub trait MilpBackend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError>;
}

/// The built-in simplex and branch-and-bound solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmbeddedBackend;

impl MilpBackend for EmbeddedBackend {
    fn name(&self) -> &str {
        "embedded"
    }

    fn solve(&self, problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError> {
        solve_milp(problem, opts)
    }
}
