use serde::Serialize;

use crate::error::Error;
use crate::formulation::CostSettings;
use crate::game::{
    design_costs, feasible_theta_interval, solve_scenario1_joint, utility_tolerance, welfare_from_costs,
    CostSource, IncentiveDesign, MilpCostEvaluator, SearchOptions,
};
use crate::model::ScenarioConfig;
use crate::par::parallel_map;

use super::run::{apply_structure, run_sweep, SweepBase, SweepResult};
use super::spec::{Axis, AxisVariable, SweepMode, SweepSpec};

/// Bargaining outcome at one deployment demand level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandLevel {
    pub demand: f64,
    /// `None` when the coordinator cannot do the deployment alone.
    pub baseline: Option<f64>,
    pub design: Option<IncentiveDesign>,
    /// Grid values of the (single) participation coefficient with
    /// nonnegative welfare.
    pub feasible_alpha: Vec<f64>,
    pub note: Option<String>,
}

impl DemandLevel {
    pub fn alpha_star(&self) -> Option<&[f64]> {
        self.design.as_ref().map(|d| d.alpha())
    }

    pub fn feasible_interval(&self) -> Option<(f64, f64)> {
        Some((*self.feasible_alpha.first()?, *self.feasible_alpha.last()?))
    }

    pub fn is_feasible(&self) -> bool {
        self.design.is_some()
    }
}

fn alpha_grid(resolution: f64) -> Result<Vec<f64>, Error> {
    let steps = SearchOptions::default().with_resolution(resolution).steps()?;
    Ok((1..=steps).map(|i| i as f64 / steps as f64).collect())
}

/// Scenario 1 per demand level on the network model. With a single
/// commercial player the feasible participation range is also mapped on a
/// grid of step `opts.resolution`.
pub fn demand_sensitivity(
    cfg: &ScenarioConfig,
    demands: &[f64],
    settings: &CostSettings,
    opts: &SearchOptions,
) -> Result<Vec<DemandLevel>, Error> {
    if demands.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Argument("demand levels must be > 0".into()));
    }
    let mut out = Vec::new();
    for &demand in demands {
        let c = apply_structure(cfg, &[(AxisVariable::Demand, 0, demand)])?;
        let mut level = DemandLevel { demand, baseline: None, design: None, feasible_alpha: Vec::new(), note: None };
        let eval = match MilpCostEvaluator::new(c, settings.clone()) {
            Ok(e) => e,
            Err(e @ (Error::Argument(_) | Error::SolverLimit(_))) => {
                level.note = Some(e.to_string());
                out.push(level);
                continue;
            }
            Err(e) => return Err(e),
        };
        level.baseline = Some(eval.baseline());
        match solve_scenario1_joint(&eval, opts) {
            Ok((d, _)) => level.design = Some(d),
            Err(e @ (Error::NoBeneficialDesign(_) | Error::SolverLimit(_))) => level.note = Some(e.to_string()),
            Err(e) => return Err(e),
        }
        if eval.num_commercial() == 1 {
            let grid = alpha_grid(opts.resolution)?;
            let q = eval.baseline();
            let welfare = parallel_map(&grid, opts.workers, |&a| design_costs(&eval, &[a]).map(|c| welfare_from_costs(q, &c)));
            for (a, u) in grid.into_iter().zip(welfare) {
                if u? >= -utility_tolerance(q) {
                    level.feasible_alpha.push(a);
                }
            }
        }
        out.push(level);
    }
    Ok(out)
}

/// Feasible incentive range of one seat at one participation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaInterval {
    pub alpha: f64,
    pub interval: Option<(f64, f64)>,
}

impl ThetaInterval {
    pub fn width(&self) -> f64 {
        self.interval.map_or(0.0, |(lo, hi)| hi - lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsruLevel {
    pub plant_mass: f64,
    pub baseline: Option<f64>,
    pub rows: Vec<ThetaInterval>,
    pub note: Option<String>,
}

impl IsruLevel {
    /// Interval width at the grid value closest to `alpha`.
    pub fn width_at(&self, alpha: f64) -> f64 {
        self.rows
            .iter()
            .min_by(|a, b| (a.alpha - alpha).abs().total_cmp(&(b.alpha - alpha).abs()))
            .map_or(0.0, |r| r.width())
    }
}

/// Feasible incentive interval of `seat` across participation levels, for
/// each plant mass of that seat. Other seats do not participate.
pub fn isru_sensitivity(
    cfg: &ScenarioConfig,
    seat: usize,
    plant_masses: &[f64],
    alphas: &[f64],
    settings: &CostSettings,
    workers: usize,
) -> Result<Vec<IsruLevel>, Error> {
    let k = cfg.num_commercial();
    if seat == 0 || seat > k {
        return Err(Error::Argument(format!("seat {seat} is not a commercial player")));
    }
    if plant_masses.iter().any(|m| !(*m >= 0.0)) || alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::Argument("plant masses must be >= 0 and alphas in [0, 1]".into()));
    }
    let mut out = Vec::new();
    for &mass in plant_masses {
        let c = apply_structure(cfg, &[(AxisVariable::PlantMass, seat, mass)])?;
        let mut level = IsruLevel { plant_mass: mass, baseline: None, rows: Vec::new(), note: None };
        let eval = match MilpCostEvaluator::new(c, settings.clone()) {
            Ok(e) => e,
            Err(e @ (Error::Argument(_) | Error::SolverLimit(_))) => {
                level.note = Some(e.to_string());
                out.push(level);
                continue;
            }
            Err(e) => return Err(e),
        };
        let q = eval.baseline();
        level.baseline = Some(q);
        let rows = parallel_map(alphas, workers, |&a| -> Result<ThetaInterval, Error> {
            let mut alpha = vec![0.0; k];
            alpha[seat - 1] = a;
            let costs = design_costs(&eval, &alpha)?;
            Ok(ThetaInterval { alpha: a, interval: feasible_theta_interval(q, &costs, &alpha, seat) })
        });
        level.rows = rows.into_iter().collect::<Result<_, _>>()?;
        out.push(level);
    }
    Ok(out)
}

/// Best participation of one player given the other's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArgmaxTrace {
    pub given: f64,
    /// `None` when no value gives a feasible design.
    pub best: Option<f64>,
    pub nash_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiPlayerGrid {
    pub sweep: SweepResult,
    /// For each alpha_2, the alpha_1 with the largest Nash product.
    pub best_alpha1: Vec<ArgmaxTrace>,
    /// For each alpha_1, the best alpha_2.
    pub best_alpha2: Vec<ArgmaxTrace>,
}

/// Two-player participation grid with incentives always set by the equal
/// split, plus the conditional argmax traces.
pub fn multi_player_grid(base: SweepBase, step: f64, workers: usize) -> Result<MultiPlayerGrid, Error> {
    if base.num_commercial() != 2 {
        return Err(Error::Argument("the participation grid needs exactly two commercial players".into()));
    }
    let mut spec = SweepSpec::new(vec![
        Axis::range(AxisVariable::Alpha, Some(1), 0.0, 1.0, step),
        Axis::range(AxisVariable::Alpha, Some(2), 0.0, 1.0, step),
    ]);
    spec.name = "participation-grid".into();
    spec.mode = Some(SweepMode::Scenario2);
    let sweep = run_sweep(base, &spec, workers)?;
    let steps = SearchOptions::default().with_resolution(step).steps()?;
    let values: Vec<f64> = (0..=steps).map(|i| ((i as f64 * step) * 1e12).round() / 1e12).collect();
    let trace = |fixed: usize, free: usize| -> Vec<ArgmaxTrace> {
        values
            .iter()
            .map(|&given| {
                let mut best: Option<(f64, f64)> = None;
                for r in sweep.records.iter().filter(|r| r.axes[fixed] == given && r.feasible) {
                    let np = r.nash_product.unwrap_or(0.0);
                    if best.is_none_or(|(_, b)| np > b) {
                        best = Some((r.axes[free], np));
                    }
                }
                ArgmaxTrace { given, best: best.map(|b| b.0), nash_product: best.map_or(0.0, |b| b.1) }
            })
            .collect()
    };
    let best_alpha1 = trace(1, 0);
    let best_alpha2 = trace(0, 1);
    Ok(MultiPlayerGrid { sweep, best_alpha1, best_alpha2 })
}
