use spacelog_milp::{solve_milp, MilpSolution, SolveStats, SolverOptions, Status};

use crate::error::Error;
use crate::model::{ArcKind, CommodityRole, ScenarioConfig};

use super::{assemble_with, AlphaSpec, AssemblyOptions, CostComponent, Formulation, ObjectiveMode, Participant};

/// Solver and assembly knobs shared by every cost evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSettings {
    pub solver: SolverOptions,
    pub assembly: AssemblyOptions,
}

impl Default for CostSettings {
    fn default() -> Self {
        CostSettings { solver: SolverOptions::default().with_gap(1e-6), assembly: AssemblyOptions::default() }
    }
}

/// An assembled model together with its solution.
#[derive(Debug, Clone)]
pub struct MissionRun {
    pub formulation: Formulation,
    pub solution: MilpSolution,
}

impl MissionRun {
    pub fn is_optimal(&self) -> bool {
        self.solution.status == Status::Optimal
    }

    pub fn attribution(&self) -> CostAttribution {
        attribute_costs(&self.formulation, &self.solution.values)
    }
}

/// Incremental cost of an assignment. `value` is `+inf` when the players
/// cannot complete it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionCost {
    pub value: f64,
    pub stats: SolveStats,
}

impl MissionCost {
    pub fn is_feasible(&self) -> bool {
        self.value.is_finite()
    }
}

/// Cost split by player and component. Costs of spacecraft are charged to
/// the player whose flow variable carries them.
#[derive(Debug, Clone, PartialEq)]
pub struct CostAttribution {
    pub total: f64,
    /// (player index, cost), one entry per participant.
    pub per_player: Vec<(usize, f64)>,
    pub per_component: [f64; 4],
    /// Per participant, split by component.
    pub per_player_component: Vec<[f64; 4]>,
}

impl CostAttribution {
    pub fn component(&self, c: CostComponent) -> f64 {
        self.per_component[c as usize]
    }

    pub fn player(&self, player: usize) -> f64 {
        self.per_player.iter().find(|(p, _)| *p == player).map_or(0.0, |(_, c)| *c)
    }
}

pub fn attribute_costs(form: &Formulation, values: &[f64]) -> CostAttribution {
    let mut per_player_component = vec![[0.0; 4]; form.participants.len()];
    let mut per_component = [0.0; 4];
    for ((key, var), costs) in form.flows.iter().zip(&form.flow_costs) {
        let x = values[var.0];
        if x == 0.0 {
            continue;
        }
        let k = form.participants.iter().position(|p| p.player == key.player).unwrap();
        for (i, c) in costs.iter().enumerate() {
            per_player_component[k][i] += c * x;
            per_component[i] += c * x;
        }
    }
    let per_player =
        form.participants.iter().zip(&per_player_component).map(|(p, c)| (p.player, c.iter().sum())).collect();
    CostAttribution { total: per_component.iter().sum(), per_player, per_component, per_player_component }
}

/// Spacecraft waiting at a node are continuous in the model; rounding them
/// down keeps every balance row satisfied because all other spacecraft
/// flows and supplies are whole.
pub fn floor_idle_spacecraft(cfg: &ScenarioConfig, form: &Formulation, values: &mut [f64]) {
    let Some(sc) = cfg.commodity_with_role(CommodityRole::Spacecraft) else { return };
    for (key, var) in &form.flows {
        if key.commodity != sc {
            continue;
        }
        let k = form.participants.iter().position(|p| p.player == key.player).unwrap();
        if form.networks[k].edges[key.edge].kind == ArcKind::Holdover {
            values[var.0] = (values[var.0] + 1e-6).floor().max(0.0);
        }
    }
}

/// Assembles and solves a model; idle spacecraft are rounded on success.
pub fn solve_mission(
    cfg: &ScenarioConfig,
    participants: &[Participant],
    alpha: &AlphaSpec,
    mode: ObjectiveMode,
    settings: &CostSettings,
) -> Result<MissionRun, Error> {
    let formulation = assemble_with(cfg, participants, alpha, mode, settings.assembly)?;
    let mut solution = solve_milp(&formulation.problem, &settings.solver)?;
    match solution.status {
        Status::Optimal => {
            floor_idle_spacecraft(cfg, &formulation, &mut solution.values);
            solution.objective_value = formulation.problem.objective_value(&solution.values);
        }
        Status::LimitReached => {
            return Err(Error::SolverLimit(format!(
                "{} stopped after {} nodes, gap {:.3e}",
                cfg.name, solution.stats.nodes, solution.gap
            )))
        }
        Status::Infeasible | Status::Unbounded => {}
    }
    Ok(MissionRun { formulation, solution })
}

fn shares_for(cfg: &ScenarioConfig, participants: &[Participant], share: impl Fn(usize) -> f64) -> AlphaSpec {
    let mut s = vec![0.0; cfg.players.len()];
    for p in participants {
        s[p.player] = share(p.player);
    }
    AlphaSpec::PlayerShares(s)
}

fn total_cost(
    cfg: &ScenarioConfig,
    participants: &[Participant],
    alpha: &AlphaSpec,
    settings: &CostSettings,
    stats: &mut SolveStats,
) -> Result<f64, Error> {
    let run = solve_mission(cfg, participants, alpha, ObjectiveMode::MinTotalCost, settings)?;
    stats.absorb(&run.solution.stats);
    Ok(if run.is_optimal() { run.solution.objective_value } else { f64::INFINITY })
}

/// Cost of the participants' own missions with no deployment assigned.
pub fn own_mission_cost(cfg: &ScenarioConfig, participants: &[Participant], settings: &CostSettings) -> Result<MissionCost, Error> {
    let mut stats = SolveStats::default();
    let value = total_cost(cfg, participants, &shares_for(cfg, participants, |_| 0.0), settings, &mut stats)?;
    Ok(MissionCost { value, stats })
}

/// Incremental cost for `participants` to carry the deployment split given
/// by the participation vector `alpha`.
pub fn mission_cost(
    cfg: &ScenarioConfig,
    participants: &[Participant],
    alpha: &[f64],
    settings: &CostSettings,
) -> Result<MissionCost, Error> {
    let mut stats = SolveStats::default();
    let with = total_cost(cfg, participants, &AlphaSpec::Fixed(alpha.to_vec()), settings, &mut stats)?;
    if !with.is_finite() {
        return Ok(MissionCost { value: f64::INFINITY, stats });
    }
    let own = total_cost(cfg, participants, &shares_for(cfg, participants, |_| 0.0), settings, &mut stats)?;
    Ok(MissionCost { value: (with - own).max(0.0), stats })
}

/// Incremental cost for one player to carry `share` of the deployment
/// demand with `fleet` spacecraft.
pub fn player_cost(
    cfg: &ScenarioConfig,
    player: usize,
    share: f64,
    fleet: u32,
    settings: &CostSettings,
) -> Result<MissionCost, Error> {
    if !(0.0..=1.0 + 1e-12).contains(&share) {
        return Err(Error::Argument(format!("share {share} is outside [0, 1]")));
    }
    let parts = [Participant { player, fleet }];
    let mut stats = SolveStats::default();
    if share == 0.0 {
        return Ok(MissionCost { value: 0.0, stats });
    }
    let with = total_cost(cfg, &parts, &shares_for(cfg, &parts, |_| share), settings, &mut stats)?;
    if !with.is_finite() {
        return Ok(MissionCost { value: f64::INFINITY, stats });
    }
    let own = total_cost(cfg, &parts, &shares_for(cfg, &parts, |_| 0.0), settings, &mut stats)?;
    Ok(MissionCost { value: (with - own).max(0.0), stats })
}

/// Baseline cost Q: the coordinator alone delivers the whole deployment
/// with its baseline fleet.
pub fn baseline_cost(cfg: &ScenarioConfig, settings: &CostSettings) -> Result<MissionCost, Error> {
    let coord = cfg.coordinator_index().ok_or_else(|| Error::Argument("scenario has no coordinator".into()))?;
    player_cost(cfg, coord, 1.0, cfg.players[coord].baseline_fleet(), settings)
}

/// Solves the baseline and returns the run for reporting.
pub fn baseline_run(cfg: &ScenarioConfig, settings: &CostSettings) -> Result<MissionRun, Error> {
    let coord = cfg.coordinator_index().ok_or_else(|| Error::Argument("scenario has no coordinator".into()))?;
    let parts = [Participant { player: coord, fleet: cfg.players[coord].baseline_fleet() }];
    solve_mission(cfg, &parts, &shares_for(cfg, &parts, |_| 1.0), ObjectiveMode::MinTotalCost, settings)
}
