use std::time::Duration;

use crate::error::MilpError;
use crate::problem::{MilpProblem, Sense, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node, iteration or time limit reached. The assignment holds the best
    /// incumbent, if any, and `gap` the gap achieved so far.
    LimitReached,
}

impl Status {
    pub fn is_optimal(self) -> bool {
        self == Status::Optimal
    }
}

/// Counters collected during a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub lp_solves: u64,
    pub elapsed: Duration,
}

impl SolveStats {
    pub fn absorb(&mut self, other: &SolveStats) {
        self.nodes += other.nodes;
        self.lp_iterations += other.lp_iterations;
        self.lp_solves += other.lp_solves;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: Status,
    pub objective_value: f64,
    /// One value per declared variable, in declaration order. Empty when no
    /// feasible point is known.
    pub values: Vec<f64>,
    /// Relative gap between the incumbent and the best remaining bound.
    pub gap: f64,
    /// Best proven bound on the optimum (upper bound when maximising).
    pub best_bound: f64,
    pub stats: SolveStats,
}

impl MilpSolution {
    pub(crate) fn without_point(status: Status, stats: SolveStats) -> Self {
        MilpSolution { status, objective_value: f64::NAN, values: Vec::new(), gap: f64::INFINITY, best_bound: f64::NAN, stats }
    }

    pub(crate) fn unbounded(sense: Sense, stats: SolveStats) -> Self {
        let inf = -sense.sign() * f64::INFINITY;
        MilpSolution { objective_value: inf, best_bound: inf, ..Self::without_point(Status::Unbounded, stats) }
    }

    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    /// Pairs of (variable name, value), for display or export.
    pub fn assignment<'a>(&'a self, problem: &'a MilpProblem) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        problem.variables.iter().zip(self.values.iter()).map(|(v, &x)| (v.name.as_str(), x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub feasibility_tolerance: f64,
    pub integrality_tolerance: f64,
    pub relative_gap: f64,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Simplex iteration cap per LP solve.
    pub iteration_limit: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tolerance: 1e-7,
            integrality_tolerance: 1e-6,
            relative_gap: 1e-6,
            node_limit: None,
            time_limit: None,
            iteration_limit: None,
        }
    }
}

impl SolverOptions {
    pub fn with_gap(mut self, gap: f64) -> Self {
        self.relative_gap = gap;
        self
    }

    pub fn with_node_limit(mut self, nodes: u64) -> Self {
        self.node_limit = Some(nodes);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<(), MilpError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(MilpError::InvalidOptions(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("feasibility_tolerance", self.feasibility_tolerance)?;
        positive("integrality_tolerance", self.integrality_tolerance)?;
        positive("relative_gap", self.relative_gap)?;
        Ok(())
    }
}

/// Independent verification of a reported solution.
///
/// Returns true iff the point satisfies every bound and constraint within the
/// feasibility tolerance, integer variables are within the integrality
/// tolerance of whole numbers, and the objective recomputed from the point
/// matches the reported value to 1e-9 relative.
pub fn check_solution(problem: &MilpProblem, solution: &MilpSolution) -> bool {
    check_solution_with(problem, solution, &SolverOptions::default())
}

pub fn check_solution_with(problem: &MilpProblem, solution: &MilpSolution, opts: &SolverOptions) -> bool {
    if solution.values.len() != problem.num_vars() {
        return false;
    }
    let tol = opts.feasibility_tolerance;
    for (v, &x) in problem.variables.iter().zip(&solution.values) {
        if !x.is_finite() || x < v.lower - tol || x > v.upper_or_inf() + tol {
            return false;
        }
        if v.is_integer() && (x - x.round()).abs() > opts.integrality_tolerance {
            return false;
        }
    }
    if problem.constraints.iter().any(|c| c.violation(&solution.values) > tol) {
        return false;
    }
    let recomputed = problem.objective_value(&solution.values);
    (recomputed - solution.objective_value).abs() <= 1e-9 * recomputed.abs().max(1.0)
}
