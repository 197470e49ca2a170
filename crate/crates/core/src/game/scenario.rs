use serde::Serialize;

use crate::error::Error;
use crate::par::{default_workers, parallel_map};

use super::utility::*;

/// Grid and tie settings of the design searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Lattice step per participation coefficient.
    pub resolution: f64,
    /// Designs whose objective is within this fraction of Q of the best
    /// one are reported as ties.
    pub tie_tolerance: f64,
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { resolution: 0.01, tie_tolerance: 1e-6, workers: default_workers() }
    }
}

impl SearchOptions {
    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Number of lattice steps along each coefficient.
    pub fn steps(&self) -> Result<usize, Error> {
        if !(self.resolution > 0.0 && self.resolution <= 1.0) {
            return Err(Error::Argument(format!("grid resolution must be in (0, 1] (got {})", self.resolution)));
        }
        Ok((1.0 / self.resolution).round().max(1.0) as usize)
    }
}

/// The outcome of a design search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncentiveDesign {
    pub scenario: u8,
    pub point: UtilityPoint,
    /// Every co-optimal design, the reported one included, ordered by alpha.
    pub ties: Vec<UtilityPoint>,
    /// Designs evaluated by the search.
    pub evaluations: usize,
}

impl IncentiveDesign {
    pub fn alpha(&self) -> &[f64] {
        &self.point.alpha
    }

    pub fn theta(&self) -> &[f64] {
        &self.point.theta
    }
}

/// Points `i / n` with nonnegative integer numerators summing to at most
/// `n`, in lexicographic order.
pub fn simplex_lattice(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == k {
            out.push(cur.iter().map(|&i| i as f64 / steps as f64).collect());
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(k, left - i, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, steps, steps, &mut Vec::new(), &mut out);
    out
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

struct Evaluated {
    alpha: Vec<f64>,
    costs: Vec<f64>,
    welfare: f64,
}

fn evaluate_lattice(src: &(impl CostSource + ?Sized), opts: &SearchOptions) -> Result<Vec<Evaluated>, Error> {
    let lattice: Vec<Vec<f64>> =
        simplex_lattice(src.num_commercial(), opts.steps()?).into_iter().filter(|a| a.iter().any(|&x| x > 0.0)).collect();
    let q = src.baseline();
    let results = parallel_map(&lattice, opts.workers, |a| design_costs(src, a));
    lattice
        .into_iter()
        .zip(results)
        .map(|(alpha, costs)| {
            let costs = costs?;
            Ok(Evaluated { welfare: welfare_from_costs(q, &costs), alpha, costs })
        })
        .collect()
}

/// Design at `alpha` with the equal-surplus incentives.
pub fn design_point(src: &(impl CostSource + ?Sized), alpha: &[f64], costs: Vec<f64>) -> Option<UtilityPoint> {
    let r = src.disagreement();
    let theta = theta_star_from_costs(src.baseline(), &costs, alpha, &r)?;
    Some(UtilityPoint::from_costs(src.baseline(), costs, alpha, &theta, &r))
}

/// Scenario 1, both coefficients free: the Nash bargaining design. It is
/// the welfare maximiser over designs where every player participates,
/// with incentives splitting the surplus equally. When no such design
/// has positive welfare, the best design with nonnegative welfare is used.
pub fn solve_scenario1(src: &(impl CostSource + ?Sized), opts: &SearchOptions) -> Result<IncentiveDesign, Error> {
    let evals = evaluate_lattice(src, opts)?;
    let q = src.baseline();
    let tol = utility_tolerance(q);
    let full: Vec<&Evaluated> = evals.iter().filter(|e| e.alpha.iter().all(|&a| a > 0.0) && e.welfare > tol).collect();
    let pool: Vec<&Evaluated> = if full.is_empty() { evals.iter().filter(|e| e.welfare >= -tol).collect() } else { full };
    let best = pool
        .iter()
        .map(|e| e.welfare)
        .fold(f64::NEG_INFINITY, f64::max);
    if pool.is_empty() {
        return Err(Error::NoBeneficialDesign("every participating design has negative welfare".into()));
    }
    let window = opts.tie_tolerance * q.abs().max(1.0);
    let mut ties: Vec<UtilityPoint> = pool
        .iter()
        .filter(|e| e.welfare >= best - window)
        .filter_map(|e| design_point(src, &e.alpha, e.costs.clone()))
        .collect();
    ties.sort_by(|a, b| lex_cmp(&a.alpha, &b.alpha));
    let point = ties
        .iter()
        .find(|p| p.welfare == best)
        .or(ties.first())
        .cloned()
        .ok_or_else(|| Error::NoBeneficialDesign("no design with nonnegative welfare".into()))?;
    Ok(IncentiveDesign { scenario: 1, point, ties, evaluations: evals.len() })
}

/// Scenario 2, participation fixed: the incentives that split the surplus
/// equally.
pub fn solve_scenario2(src: &(impl CostSource + ?Sized), alpha: &[f64]) -> Result<IncentiveDesign, Error> {
    let costs = design_costs(src, alpha)?;
    let u = welfare_from_costs(src.baseline(), &costs);
    let point = design_point(src, alpha, costs).ok_or_else(|| {
        if u.is_finite() {
            Error::NoBeneficialDesign(format!("welfare at alpha {alpha:?} is {:.6e} < 0", u))
        } else {
            Error::NoBeneficialDesign(format!("the assignment alpha {alpha:?} cannot be completed"))
        }
    })?;
    Ok(IncentiveDesign { scenario: 2, ties: vec![point.clone()], point, evaluations: 1 })
}

/// Scenario 3, incentives fixed: the participation vector maximising the
/// Nash product, by exhaustive search of the lattice.
pub fn solve_scenario3(src: &(impl CostSource + ?Sized), theta: &[f64], opts: &SearchOptions) -> Result<IncentiveDesign, Error> {
    let k = src.num_commercial();
    if theta.len() != k || theta.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Argument(format!("expected {k} nonnegative incentive coefficients, got {theta:?}")));
    }
    let evals = evaluate_lattice(src, opts)?;
    let q = src.baseline();
    let r = src.disagreement();
    let points: Vec<UtilityPoint> = evals
        .iter()
        .map(|e| UtilityPoint::from_costs(q, e.costs.clone(), &e.alpha, theta, &r))
        .filter(|p| p.is_feasible())
        .collect();
    if points.is_empty() {
        return Err(Error::NoBeneficialDesign(format!("no participation vector leaves every utility nonnegative at theta {theta:?}")));
    }
    let best = points.iter().map(|p| p.nash_product.unwrap()).fold(0.0, f64::max);
    let mut ties: Vec<UtilityPoint> = if best > 0.0 {
        let window = opts.tie_tolerance * best;
        points.iter().filter(|p| p.nash_product.unwrap() >= best - window).cloned().collect()
    } else {
        // every product vanishes: fall back to welfare
        let top = points.iter().map(|p| p.welfare).fold(f64::NEG_INFINITY, f64::max);
        let window = opts.tie_tolerance * q.abs().max(1.0);
        points.iter().filter(|p| p.welfare >= top - window).cloned().collect()
    };
    ties.sort_by(|a, b| lex_cmp(&a.alpha, &b.alpha));
    let point = if best > 0.0 {
        ties.iter().find(|p| p.nash_product == Some(best)).cloned()
    } else {
        let top = ties.iter().map(|p| p.welfare).fold(f64::NEG_INFINITY, f64::max);
        ties.iter().find(|p| p.welfare == top).cloned()
    }
    .expect("ties contain the optimum");
    Ok(IncentiveDesign { scenario: 3, point, ties, evaluations: evals.len() })
}

#[cfg(test)]
mod tests {
    use super::super::CurveSet;
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(simplex_lattice(1, 4).len(), 5);
        assert_eq!(simplex_lattice(2, 4).len(), 15);
        assert_eq!(simplex_lattice(3, 10).len(), 286);
        assert!(simplex_lattice(2, 10).iter().all(|a| a.iter().sum::<f64>() <= 1.0 + 1e-12));
    }

    #[test]
    fn linear_curves() {
        let set = CurveSet::linear(100.0, &[60.0]);
        let opts = SearchOptions::default().with_workers(1);
        let d = solve_scenario1(&set, &opts).unwrap();
        assert!((d.alpha()[0] - 1.0).abs() < 1e-12);
        assert!((d.theta()[0] - 0.8).abs() < 1e-12);
        assert_eq!(d.ties.len(), 1);

        let d2 = solve_scenario2(&set, &[1.0]).unwrap();
        assert!((d2.theta()[0] - 0.8).abs() < 1e-12);

        let d3 = solve_scenario3(&set, &[0.8], &opts).unwrap();
        assert!((d3.alpha()[0] - 1.0).abs() < 1e-12);
        assert!((d3.point.u_o - 20.0).abs() < 1e-9 && (d3.point.u_p[0] - 20.0).abs() < 1e-9);

        assert!(matches!(solve_scenario3(&set, &[0.5], &opts), Err(Error::NoBeneficialDesign(_))));
    }

    #[test]
    fn nothing_beneficial() {
        let set = CurveSet::linear(100.0, &[150.0]);
        let opts = SearchOptions::default().with_workers(1);
        assert!(matches!(solve_scenario1(&set, &opts), Err(Error::NoBeneficialDesign(_))));
        assert!(matches!(solve_scenario2(&set, &[0.5]), Err(Error::NoBeneficialDesign(_))));
    }

    #[test]
    fn symmetric_players_tie() {
        use super::super::{CostCurve, CurveSource};
        // coordinator cannot fly at all, each player can carry at most 60%
        let coord = CostCurve::from_pairs("o", &[(0.0, 0.0), (0.01, f64::INFINITY), (1.0, f64::INFINITY)], CurveSource::UserSupplied).unwrap();
        let p = |id: &str| {
            CostCurve::from_pairs(id, &[(0.0, 0.0), (0.4, 10.0), (0.6, 15.0), (0.61, f64::INFINITY), (1.0, f64::INFINITY)], CurveSource::UserSupplied)
                .unwrap()
        };
        let set = CurveSet::new(100.0, coord, vec![p("a"), p("b")]);
        let d = solve_scenario1(&set, &SearchOptions::default().with_resolution(0.1).with_workers(2)).unwrap();
        let alphas: Vec<Vec<f64>> = d.ties.iter().map(|t| t.alpha.clone()).collect();
        assert_eq!(alphas.len(), 3, "{alphas:?}");
        assert!(alphas.iter().all(|a| (a[0] + a[1] - 1.0).abs() < 1e-12));
    }
}
