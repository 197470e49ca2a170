use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use spacelog_milp::SolveStats;

use crate::error::Error;
use crate::formulation::{
    all_participants, attribute_costs, baseline_cost, own_mission_cost, player_cost, solve_mission, AlphaSpec, CostSettings,
    MissionRun, ObjectiveMode,
};
use crate::model::ScenarioConfig;

use super::curve::{CostCurve, CurvePoint, CurveSource};
use super::scenario::{design_point, IncentiveDesign, SearchOptions};
use super::utility::*;

/// Prices deployment shares with the network model, memoising results by
/// (player, share).
#[derive(Debug)]
pub struct MilpCostEvaluator {
    cfg: ScenarioConfig,
    settings: CostSettings,
    baseline: f64,
    /// Player index per game seat, coordinator first.
    seats: Vec<usize>,
    cache: Option<Mutex<HashMap<(usize, i64), f64>>>,
    stats: Mutex<SolveStats>,
    solves: AtomicUsize,
}

const SHARE_QUANTUM: f64 = 1e9;

impl MilpCostEvaluator {
    /// Computes Q first; fails when the coordinator cannot do the
    /// deployment alone.
    pub fn new(cfg: ScenarioConfig, settings: CostSettings) -> Result<Self, Error> {
        let q = baseline_cost(&cfg, &settings)?;
        if !q.is_feasible() {
            return Err(Error::Argument(format!("scenario `{}`: the coordinator cannot complete the deployment alone", cfg.name)));
        }
        let e = Self::with_baseline(cfg, settings, q.value)?;
        e.stats.lock().unwrap().absorb(&q.stats);
        Ok(e)
    }

    pub fn with_baseline(cfg: ScenarioConfig, settings: CostSettings, baseline: f64) -> Result<Self, Error> {
        let coord = cfg.coordinator_index().ok_or_else(|| Error::Argument("scenario has no coordinator".into()))?;
        let mut seats = vec![coord];
        seats.extend(cfg.commercial_indices());
        Ok(MilpCostEvaluator {
            cfg,
            settings,
            baseline,
            seats,
            cache: Some(Mutex::new(HashMap::new())),
            stats: Mutex::new(SolveStats::default()),
            solves: AtomicUsize::new(0),
        })
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn settings(&self) -> &CostSettings {
        &self.settings
    }

    /// Player index of game seat `z` (0 = coordinator).
    pub fn player_of(&self, z: usize) -> usize {
        self.seats[z]
    }

    pub fn stats(&self) -> SolveStats {
        *self.stats.lock().unwrap()
    }

    /// Cost evaluations that ran the solver (cache misses).
    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }
}

impl CostSource for MilpCostEvaluator {
    fn baseline(&self) -> f64 {
        self.baseline
    }

    fn num_commercial(&self) -> usize {
        self.seats.len() - 1
    }

    fn cost(&self, z: usize, share: f64) -> Result<f64, Error> {
        let Some(&player) = self.seats.get(z) else { return Err(Error::Argument(format!("no player {z}"))) };
        let key = (z, (share * SHARE_QUANTUM).round() as i64);
        let share = key.1 as f64 / SHARE_QUANTUM;
        if let Some(c) = &self.cache {
            if let Some(&v) = c.lock().unwrap().get(&key) {
                return Ok(v);
            }
        }
        let fleet = self.cfg.players[player].fleet_per_mission;
        let r = player_cost(&self.cfg, player, share, fleet, &self.settings)?;
        self.stats.lock().unwrap().absorb(&r.stats);
        self.solves.fetch_add(1, Ordering::Relaxed);
        if let Some(c) = &self.cache {
            c.lock().unwrap().insert(key, r.value);
        }
        Ok(r.value)
    }
}

/// Samples seat `z`'s cost curve on `grid`. Points where the solver hits a
/// limit are kept as unevaluated.
pub fn cost_curve_from_milp(eval: &MilpCostEvaluator, z: usize, grid: &[f64], workers: usize) -> Result<CostCurve, Error> {
    if grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::Argument("curve grid must lie in [0, 1]".into()));
    }
    let results = crate::par::parallel_map(grid, workers, |&a| eval.cost(z, a));
    let mut samples = Vec::with_capacity(grid.len());
    for (&a, r) in grid.iter().zip(results) {
        samples.push(match r {
            Ok(c) => CurvePoint::new(a, c),
            Err(Error::SolverLimit(_)) => CurvePoint::unevaluated(a),
            Err(e) => return Err(e),
        });
    }
    let id = eval.config().players[eval.player_of(z)].id.clone();
    CostCurve::new(id, samples, CurveSource::MilpEvaluated)
}

/// Scenario 1 on the network model in one solve: participation becomes a
/// continuous variable of a joint model that maximises welfare under the
/// budget cap. Every commercial player is required to take at least one
/// grid step unless that is infeasible. Permutations of the optimum that
/// score the same are reported as ties.
pub fn solve_scenario1_joint(eval: &MilpCostEvaluator, opts: &SearchOptions) -> Result<(IncentiveDesign, MissionRun), Error> {
    let cfg = eval.config();
    let settings = eval.settings();
    let parts = all_participants(cfg);
    let own = own_mission_cost(cfg, &parts, settings)?;
    if !own.is_feasible() {
        return Err(Error::NoBeneficialDesign("the players cannot complete their own missions".into()));
    }
    let q = eval.baseline();
    let mode = ObjectiveMode::MaxWelfare { baseline: q, own_costs: own.value };
    let mut run = None;
    for lower in [opts.resolution, 0.0] {
        let r = solve_mission(cfg, &parts, &AlphaSpec::Free { lower }, mode, settings)?;
        if r.is_optimal() {
            run = Some(r);
            break;
        }
    }
    let run = run.ok_or_else(|| Error::NoBeneficialDesign("no participation vector keeps the cost within the baseline".into()))?;
    let mut alpha: Vec<f64> =
        run.formulation.alpha_vars.iter().map(|v| (run.solution.values[v.0] * SHARE_QUANTUM).round() / SHARE_QUANTUM).collect();
    let sum: f64 = alpha.iter().sum();
    if sum > 1.0 {
        alpha.iter_mut().for_each(|a| *a /= sum);
    }
    if alpha.iter().all(|&a| a <= 0.0) {
        return Err(Error::NoBeneficialDesign("only the disagreement design keeps the cost within the baseline".into()));
    }

    let point_at = |a: &[f64]| -> Result<Option<super::UtilityPoint>, Error> {
        let costs = design_costs(eval, a)?;
        Ok(design_point(eval, a, costs))
    };
    let point = match point_at(&alpha)? {
        Some(p) => p,
        None => {
            // re-solving the fixed split can lose feasibility right at a capacity edge;
            // fall back to the joint solution's own accounting
            let attr = attribute_costs(&run.formulation, &run.solution.values);
            let own_by_player: Vec<f64> = (0..=eval.num_commercial())
                .map(|z| own_mission_cost(cfg, &[parts[eval.player_of(z)]], settings).map(|c| c.value))
                .collect::<Result<_, _>>()?;
            let costs: Vec<f64> =
                (0..=eval.num_commercial()).map(|z| (attr.player(eval.player_of(z)) - own_by_player[z]).max(0.0)).collect();
            design_point(eval, &alpha, costs)
                .ok_or_else(|| Error::NoBeneficialDesign(format!("welfare at alpha {alpha:?} is negative")))?
        }
    };

    let window = opts.tie_tolerance * q.abs().max(1.0);
    let mut ties = vec![point.clone()];
    for perm in permutations(&alpha) {
        if perm == alpha || ties.iter().any(|t| t.alpha == perm) {
            continue;
        }
        if let Some(p) = point_at(&perm)? {
            if p.welfare >= point.welfare - window {
                ties.push(p);
            }
        }
    }
    ties.sort_by(|a, b| a.alpha.iter().zip(&b.alpha).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    Ok((IncentiveDesign { scenario: 1, point, ties, evaluations: 1 }, run))
}

fn permutations(v: &[f64]) -> Vec<Vec<f64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
