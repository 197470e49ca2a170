use serde::Serialize;

use crate::error::Error;

use super::CurveSet;

/// Anything that prices a player's deployment share: user curves or the
/// network model. Player 0 is the coordinator, whose argument is its own
/// share `1 - sum(alpha)`; players `1..=K` are the commercial players.
pub trait CostSource: Sync {
    /// Baseline cost Q.
    fn baseline(&self) -> f64;
    fn num_commercial(&self) -> usize;
    /// Incremental cost of player `z` for `share` of the deployment; `+inf`
    /// when it cannot be completed.
    fn cost(&self, z: usize, share: f64) -> Result<f64, Error>;
    /// Disagreement utilities, coordinator first; zero by default.
    fn disagreement(&self) -> Vec<f64> {
        vec![0.0; self.num_commercial() + 1]
    }
}

impl CostSource for CurveSet {
    fn baseline(&self) -> f64 {
        self.baseline
    }

    fn num_commercial(&self) -> usize {
        self.players.len()
    }

    fn cost(&self, z: usize, share: f64) -> Result<f64, Error> {
        match z {
            0 => Ok(self.coordinator.eval(share)),
            k if k <= self.players.len() => Ok(self.players[k - 1].eval(share)),
            _ => Err(Error::Argument(format!("no player {z}"))),
        }
    }

    fn disagreement(&self) -> Vec<f64> {
        if self.disagreement.is_empty() {
            vec![0.0; self.players.len() + 1]
        } else {
            self.disagreement.clone()
        }
    }
}

/// Tolerance below which a utility counts as zero.
pub fn utility_tolerance(baseline: f64) -> f64 {
    1e-9 * baseline.abs().max(1.0)
}

/// `1 - sum(alpha)`, snapped to 1e-12 so lattice points land on samples.
pub fn coordinator_share(alpha: &[f64]) -> f64 {
    ((1.0 - alpha.iter().sum::<f64>()) * 1e12).round().max(0.0) / 1e12
}

pub fn check_simplex(alpha: &[f64], k: usize) -> Result<(), Error> {
    if alpha.len() != k {
        return Err(Error::Argument(format!("expected {k} participation coefficients, got {}", alpha.len())));
    }
    if alpha.iter().any(|a| !(0.0..=1.0 + 1e-12).contains(a)) || alpha.iter().sum::<f64>() > 1.0 + 1e-9 {
        return Err(Error::Argument(format!("participation vector {alpha:?} is outside the simplex")));
    }
    Ok(())
}

/// `Q - J_o - sum(alpha_k theta_k Q)`.
pub fn utility_coordinator(q: f64, j_o: f64, alpha: &[f64], theta: &[f64]) -> f64 {
    q - j_o - alpha.iter().zip(theta).map(|(a, t)| a * t * q).sum::<f64>()
}

/// `alpha_k theta_k Q - J_k`.
pub fn utility_player(q: f64, j_p: f64, alpha_k: f64, theta_k: f64) -> f64 {
    alpha_k * theta_k * q - j_p
}

/// Costs of a design, coordinator first: `[J_o(1 - sum alpha), J_1(alpha_1), ...]`.
pub fn design_costs(src: &(impl CostSource + ?Sized), alpha: &[f64]) -> Result<Vec<f64>, Error> {
    check_simplex(alpha, src.num_commercial())?;
    let mut out = vec![src.cost(0, coordinator_share(alpha))?];
    for (k, &a) in alpha.iter().enumerate() {
        out.push(if a == 0.0 { 0.0 } else { src.cost(k + 1, a)? });
    }
    Ok(out)
}

/// Total utility, independent of theta; `-inf` when some player cannot
/// complete its share.
pub fn welfare_from_costs(q: f64, costs: &[f64]) -> f64 {
    if costs.iter().any(|c| !c.is_finite()) {
        return f64::NEG_INFINITY;
    }
    q - costs.iter().sum::<f64>()
}

pub fn welfare(src: &(impl CostSource + ?Sized), alpha: &[f64]) -> Result<f64, Error> {
    Ok(welfare_from_costs(src.baseline(), &design_costs(src, alpha)?))
}

/// Whether every player's utility is nonnegative: the coordinator pays no
/// more than it saves, and each participating player is paid at least its cost.
pub fn omega_contains_costs(q: f64, costs: &[f64], alpha: &[f64], theta: &[f64]) -> bool {
    let tol = utility_tolerance(q);
    if !costs[0].is_finite() {
        return false;
    }
    let paid: f64 = alpha.iter().zip(theta).map(|(a, t)| a * t).sum();
    if paid * q > q - costs[0] + tol {
        return false;
    }
    alpha.iter().zip(theta).zip(&costs[1..]).all(|((&a, &t), &j)| a == 0.0 || (j.is_finite() && a * t * q >= j - tol))
}

pub fn omega_contains(src: &(impl CostSource + ?Sized), alpha: &[f64], theta: &[f64]) -> Result<bool, Error> {
    Ok(omega_contains_costs(src.baseline(), &design_costs(src, alpha)?, alpha, theta))
}

/// Incentive coefficients that split the surplus over the disagreement
/// point equally. Players with `alpha_k = 0` sit out and get `theta_k = 0`.
/// `None` when the total surplus is negative or some cost is infinite.
pub fn theta_star_from_costs(q: f64, costs: &[f64], alpha: &[f64], r: &[f64]) -> Option<Vec<f64>> {
    let u = welfare_from_costs(q, costs);
    let active: Vec<usize> = (0..alpha.len()).filter(|&k| alpha[k] > 0.0).collect();
    let surplus_total = u - r[0] - active.iter().map(|&k| r[k + 1]).sum::<f64>();
    if !u.is_finite() || surplus_total < -utility_tolerance(q) {
        return None;
    }
    let share = surplus_total.max(0.0) / (active.len() + 1) as f64;
    let mut theta = vec![0.0; alpha.len()];
    for &k in &active {
        theta[k] = (r[k + 1] + share + costs[k + 1]) / (alpha[k] * q);
    }
    Some(theta)
}

pub fn theta_star(src: &(impl CostSource + ?Sized), alpha: &[f64]) -> Result<Option<Vec<f64>>, Error> {
    Ok(theta_star_from_costs(src.baseline(), &design_costs(src, alpha)?, alpha, &src.disagreement()))
}

/// Range of seat `k`'s incentive coefficient (1-based) that keeps every
/// utility nonnegative when the other players are paid break-even:
/// `[J_k / (alpha_k Q), (J_k + U) / (alpha_k Q)]`. `None` when the
/// interval is empty or seat `k` does not participate.
pub fn feasible_theta_interval(q: f64, costs: &[f64], alpha: &[f64], k: usize) -> Option<(f64, f64)> {
    let a = *alpha.get(k.checked_sub(1)?)?;
    let u = welfare_from_costs(q, costs);
    if !(a > 0.0) || !u.is_finite() || u < -utility_tolerance(q) {
        return None;
    }
    let lo = costs[k] / (a * q);
    Some((lo, lo + u.max(0.0) / (a * q)))
}

/// Utilities and derived quantities of one design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityPoint {
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    pub u_o: f64,
    pub u_p: Vec<f64>,
    /// Disagreement utilities, coordinator first.
    pub r: Vec<f64>,
    pub welfare: f64,
    /// Product of surpluses; `None` when some surplus is negative.
    pub nash_product: Option<f64>,
    /// `[J_o, J_1, ..., J_K]` at this design.
    pub costs: Vec<f64>,
    pub baseline: f64,
}

impl UtilityPoint {
    pub fn from_costs(q: f64, costs: Vec<f64>, alpha: &[f64], theta: &[f64], r: &[f64]) -> Self {
        let u_o = if costs[0].is_finite() { utility_coordinator(q, costs[0], alpha, theta) } else { f64::NEG_INFINITY };
        let u_p: Vec<f64> = (0..alpha.len())
            .map(|k| if costs[k + 1].is_finite() { utility_player(q, costs[k + 1], alpha[k], theta[k]) } else { f64::NEG_INFINITY })
            .collect();
        let welfare = u_o + u_p.iter().sum::<f64>();
        let mut p = UtilityPoint {
            alpha: alpha.to_vec(),
            theta: theta.to_vec(),
            u_o,
            u_p,
            r: r.to_vec(),
            welfare,
            nash_product: None,
            costs,
            baseline: q,
        };
        p.nash_product = nash_product(&p);
        p
    }

    pub fn evaluate(src: &(impl CostSource + ?Sized), alpha: &[f64], theta: &[f64]) -> Result<Self, Error> {
        let costs = design_costs(src, alpha)?;
        Ok(Self::from_costs(src.baseline(), costs, alpha, theta, &src.disagreement()))
    }

    pub fn utilities(&self) -> Vec<f64> {
        std::iter::once(self.u_o).chain(self.u_p.iter().copied()).collect()
    }

    /// Every utility is at least its disagreement value.
    pub fn is_feasible(&self) -> bool {
        self.nash_product.is_some()
    }

    pub fn incentive_paid(&self) -> f64 {
        self.alpha.iter().zip(&self.theta).map(|(a, t)| a * t * self.baseline).sum()
    }

    /// Coordinator's own mission cost plus incentives; equals `Q - u_o`.
    pub fn coordinator_expense(&self) -> f64 {
        self.costs[0] + self.incentive_paid()
    }
}

/// Product of surpluses over all players. Surpluses within rounding of
/// zero count as zero; a clearly negative one gives `None`.
pub fn nash_product(p: &UtilityPoint) -> Option<f64> {
    let tol = utility_tolerance(p.baseline);
    let mut prod = 1.0;
    for (u, r) in p.utilities().iter().zip(&p.r) {
        let s = u - r;
        if !(s >= -tol) {
            return None;
        }
        prod *= s.max(0.0);
    }
    Some(prod)
}

/// Smallest utility at a design.
pub fn maximin_value(p: &UtilityPoint) -> f64 {
    p.utilities().into_iter().fold(f64::INFINITY, f64::min)
}
