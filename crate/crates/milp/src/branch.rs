use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::MilpError;
use crate::problem::MilpProblem;
use crate::simplex::{LpStatus, StandardLp};
use crate::solution::{MilpSolution, SolveStats, SolverOptions, Status};

struct Node {
    bound: f64,
    depth: u32,
    id: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the greatest: smallest bound first, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

pub(crate) fn default_iteration_limit(p: &MilpProblem) -> u64 {
    (50 * (p.num_vars() + p.num_constraints()) as u64).max(10_000)
}

fn rel_gap(incumbent: f64, bound: f64) -> f64 {
    if !incumbent.is_finite() {
        return f64::INFINITY;
    }
    ((incumbent - bound).max(0.0)) / incumbent.abs().max(1.0)
}

struct Search<'a> {
    problem: &'a MilpProblem,
    lp: StandardLp,
    opts: &'a SolverOptions,
    sign: f64,
    int_vars: Vec<usize>,
    stats: SolveStats,
    iter_limit: u64,
    hit_iteration_limit: bool,
}

impl Search<'_> {
    /// Objective in minimisation sense, without the constant term.
    fn min_objective(&self, x: &[f64]) -> f64 {
        self.sign * self.problem.objective.terms.iter().map(|&(v, c)| c * x[v.0]).sum::<f64>()
    }

    fn solve_lp(&mut self, lower: &[f64], upper: &[f64]) -> (LpStatus, Vec<f64>) {
        let out = self.lp.solve(lower, upper, self.iter_limit);
        self.stats.lp_iterations += out.iterations;
        self.stats.lp_solves += 1;
        if out.status == LpStatus::IterationLimit {
            self.hit_iteration_limit = true;
        }
        (out.status, out.x)
    }

    fn most_fractional(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.int_vars {
            let f = x[j] - x[j].floor();
            let score = f.min(1.0 - f);
            if score > self.opts.integrality_tolerance && best.is_none_or(|(_, s)| score > s + 1e-12) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Rounds the integer part of a point, then re-optimises the continuous
    /// part with the integers fixed so the reported point is exactly integral.
    fn polish(&mut self, x: &[f64], lower: &[f64], upper: &[f64]) -> Option<Vec<f64>> {
        if self.int_vars.is_empty() {
            return Some(x.to_vec());
        }
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for &j in &self.int_vars {
            let r = x[j].round().clamp(lower[j], upper[j]);
            lo[j] = r;
            up[j] = r;
        }
        let (status, mut y) = self.solve_lp(&lo, &up);
        if status != LpStatus::Optimal {
            return None;
        }
        for &j in &self.int_vars {
            y[j] = lo[j];
        }
        Some(y)
    }
}

fn integer_bounds(p: &MilpProblem, tol: f64) -> (Vec<f64>, Vec<f64>) {
    let mut lower = Vec::with_capacity(p.num_vars());
    let mut upper = Vec::with_capacity(p.num_vars());
    for v in &p.variables {
        let (mut l, mut u) = (v.lower, v.upper_or_inf());
        if v.is_integer() {
            l = (l - tol).ceil();
            if u.is_finite() {
                u = (u + tol).floor();
            }
        }
        lower.push(l);
        upper.push(u);
    }
    (lower, upper)
}

fn finish(p: &MilpProblem, status: Status, x: Vec<f64>, best_bound_min: f64, sign: f64, stats: SolveStats) -> MilpSolution {
    let objective_value = p.objective_value(&x);
    let best_bound = sign * best_bound_min + p.objective.constant;
    let incumbent_min = sign * (objective_value - p.objective.constant);
    MilpSolution {
        status,
        objective_value,
        values: x,
        gap: rel_gap(incumbent_min, best_bound_min),
        best_bound,
        stats,
    }
}

pub(crate) fn branch_and_bound(problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    opts.validate()?;
    let started = Instant::now();
    let sign = problem.sense.sign();
    let int_vars: Vec<usize> =
        problem.variables.iter().enumerate().filter(|(_, v)| v.is_integer()).map(|(j, _)| j).collect();
    let mut s = Search {
        problem,
        lp: StandardLp::new(problem),
        opts,
        sign,
        int_vars,
        stats: SolveStats::default(),
        iter_limit: opts.iteration_limit.unwrap_or_else(|| default_iteration_limit(problem)),
        hit_iteration_limit: false,
    };
    let (lower, upper) = integer_bounds(problem, opts.integrality_tolerance);

    let (status, x) = s.solve_lp(&lower, &upper);
    s.stats.nodes = 1;
    match status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            s.stats.elapsed = started.elapsed();
            return Ok(MilpSolution::without_point(Status::Infeasible, s.stats));
        }
        LpStatus::Unbounded => {
            s.stats.elapsed = started.elapsed();
            return Ok(MilpSolution::unbounded(problem.sense, s.stats));
        }
        LpStatus::IterationLimit => {
            s.stats.elapsed = started.elapsed();
            return Ok(MilpSolution::without_point(Status::LimitReached, s.stats));
        }
    }

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    let root_bound = s.min_objective(&x);
    heap.push(Node { bound: root_bound, depth: 0, id: next_id, lower, upper, x });
    next_id += 1;
    let mut global_bound = root_bound;

    while let Some(node) = heap.pop() {
        global_bound = node.bound;
        let cutoff = |inc: &Option<(f64, Vec<f64>)>, bound: f64| match inc {
            Some((v, _)) => rel_gap(*v, bound) <= opts.relative_gap || bound >= *v,
            None => false,
        };
        if cutoff(&incumbent, node.bound) {
            // best-first: every remaining node is at least as bad
            heap.clear();
            break;
        }
        let out_of_budget = opts.node_limit.is_some_and(|l| s.stats.nodes >= l)
            || opts.time_limit.is_some_and(|l| started.elapsed() >= l);
        if out_of_budget {
            heap.push(node);
            break;
        }

        let Some(j) = s.most_fractional(&node.x) else {
            if let Some(y) = s.polish(&node.x, &node.lower, &node.upper) {
                let v = s.min_objective(&y);
                if incumbent.as_ref().is_none_or(|(best, _)| v < *best) {
                    incumbent = Some((v, y));
                }
            }
            continue;
        };
        let xj = node.x[j];
        for (child_lower, child_upper) in [
            {
                let mut u = node.upper.clone();
                u[j] = xj.floor();
                (node.lower.clone(), u)
            },
            {
                let mut l = node.lower.clone();
                l[j] = xj.ceil();
                (l, node.upper.clone())
            },
        ] {
            s.stats.nodes += 1;
            let (status, x) = s.solve_lp(&child_lower, &child_upper);
            if status != LpStatus::Optimal {
                continue;
            }
            let bound = s.min_objective(&x);
            if cutoff(&incumbent, bound) {
                continue;
            }
            heap.push(Node { bound, depth: node.depth + 1, id: next_id, lower: child_lower, upper: child_upper, x });
            next_id += 1;
        }
    }

    s.stats.elapsed = started.elapsed();
    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    match incumbent {
        Some((v, y)) => {
            let best_bound = if heap.is_empty() { global_bound.min(v) } else { open_bound.min(v) };
            let status = if heap.is_empty() && !s.hit_iteration_limit { Status::Optimal } else { Status::LimitReached };
            let status = if rel_gap(v, best_bound) <= opts.relative_gap && !s.hit_iteration_limit {
                Status::Optimal
            } else {
                status
            };
            Ok(finish(problem, status, y, best_bound, sign, s.stats))
        }
        None if heap.is_empty() && !s.hit_iteration_limit => Ok(MilpSolution::without_point(Status::Infeasible, s.stats)),
        None => {
            let mut sol = MilpSolution::without_point(Status::LimitReached, s.stats);
            sol.best_bound = sign * open_bound + problem.objective.constant;
            Ok(sol)
        }
    }
}

/// Solves the continuous relaxation and reports the vertex found.
pub(crate) fn solve_relaxation(problem: &MilpProblem, opts: &SolverOptions) -> Result<MilpSolution, MilpError> {
    problem.validate()?;
    opts.validate()?;
    let started = Instant::now();
    let lp = StandardLp::new(problem);
    let lower: Vec<f64> = problem.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = problem.variables.iter().map(|v| v.upper_or_inf()).collect();
    let limit = opts.iteration_limit.unwrap_or_else(|| default_iteration_limit(problem));
    let out = lp.solve(&lower, &upper, limit);
    let stats = SolveStats { nodes: 0, lp_iterations: out.iterations, lp_solves: 1, elapsed: started.elapsed() };
    Ok(match out.status {
        LpStatus::Optimal => {
            let sign = problem.sense.sign();
            let bound = sign * (problem.objective_value(&out.x) - problem.objective.constant);
            finish(problem, Status::Optimal, out.x, bound, sign, stats)
        }
        LpStatus::Infeasible => MilpSolution::without_point(Status::Infeasible, stats),
        LpStatus::Unbounded => MilpSolution::unbounded(problem.sense, stats),
        LpStatus::IterationLimit => MilpSolution::without_point(Status::LimitReached, stats),
    })
}
