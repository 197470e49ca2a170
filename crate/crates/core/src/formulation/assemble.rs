use std::collections::HashMap;

use spacelog_milp::{Domain, LinearExpr, MilpProblem, Relation, Sense, VarId, Variable};

use crate::error::Error;
use crate::model::{
    expand_demands, expand_for_player, layer_for, ArcKind, CommodityRole, GridDemand, Role, ScenarioConfig,
    TimeExpandedNetwork, TimeNode,
};

use super::prune::{prune, PruneInput};
use super::{transform_rule, unit_costs, FlowVariableKey, TransformRule};

/// How the participation vector enters the model.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    /// One fraction per commercial player, in declaration order.
    Fixed(Vec<f64>),
    /// Deployment share per player, indexed like `ScenarioConfig::players`.
    PlayerShares(Vec<f64>),
    /// Fractions become continuous decision variables with this lower bound.
    Free { lower: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveMode {
    MinTotalCost,
    /// Maximise `baseline - incremental cost`, subject to the budget cap
    /// `incremental cost <= baseline`. `own_costs` is subtracted from the
    /// total to make costs incremental.
    MaxWelfare { baseline: f64, own_costs: f64 },
}

/// A player taking part in an assembled model, with its fleet cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Participant {
    pub player: usize,
    pub fleet: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyOptions {
    pub prune: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { prune: true }
    }
}

/// Share of D carried by a player: `constant + sum(coef * alpha var)`.
#[derive(Debug, Clone, PartialEq)]
struct Share {
    constant: f64,
    terms: Vec<(VarId, f64)>,
}

/// An assembled model plus the bookkeeping needed to read solutions back.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub problem: MilpProblem,
    pub participants: Vec<Participant>,
    /// Expanded network seen by each participant (same order).
    pub networks: Vec<TimeExpandedNetwork>,
    pub flows: Vec<(FlowVariableKey, VarId)>,
    /// Per flow entry, unit cost split by component.
    pub flow_costs: Vec<[f64; 4]>,
    /// Free participation variables, one per commercial player.
    pub alpha_vars: Vec<VarId>,
    /// Per participant, every demand and supply entry used (deployment included
    /// when the share is fixed).
    pub demands: Vec<Vec<GridDemand>>,
    pub mode: ObjectiveMode,
}

impl Formulation {
    pub fn network_of(&self, player: usize) -> Option<&TimeExpandedNetwork> {
        self.participants.iter().position(|p| p.player == player).map(|k| &self.networks[k])
    }

    /// Total cost term `sum c^T x` of a solution vector.
    pub fn total_cost(&self, values: &[f64]) -> f64 {
        self.flows.iter().zip(&self.flow_costs).map(|((_, v), c)| c.iter().sum::<f64>() * values[v.0]).sum()
    }
}

pub(crate) fn check_alpha(cfg: &ScenarioConfig, alpha: &[f64]) -> Result<(), Error> {
    let k = cfg.num_commercial();
    if alpha.len() != k {
        return Err(Error::Argument(format!("expected {k} participation coefficients, got {}", alpha.len())));
    }
    let sum: f64 = alpha.iter().sum();
    if alpha.iter().any(|a| !(-1e-12..=1.0 + 1e-12).contains(a)) || sum > 1.0 + 1e-9 {
        return Err(Error::Argument(format!("participation vector {alpha:?} is outside the simplex")));
    }
    Ok(())
}

/// Deployment share of each player for a fixed participation vector.
pub fn deployment_shares(cfg: &ScenarioConfig, alpha: &[f64]) -> Result<Vec<f64>, Error> {
    check_alpha(cfg, alpha)?;
    let commercial = cfg.commercial_indices();
    let mut shares = vec![0.0; cfg.players.len()];
    let total: f64 = alpha.iter().sum();
    for (i, p) in cfg.players.iter().enumerate() {
        shares[i] = match p.role {
            Role::Coordinator => (1.0 - total).max(0.0),
            Role::Commercial => alpha[commercial.iter().position(|&c| c == i).unwrap()].max(0.0),
        };
    }
    Ok(shares)
}

/// Pre-deployed plant and its initial spares, as supplies at layer 0.
fn plant_supplies(cfg: &ScenarioConfig, player: usize) -> Vec<GridDemand> {
    let p = &cfg.players[player];
    let mut out = Vec::new();
    if p.isru_plant_mass <= 0.0 {
        return out;
    }
    let node = p
        .isru_node
        .as_deref()
        .and_then(|n| cfg.node_index(n))
        .or_else(|| cfg.nodes.iter().position(|n| n.isru_capable));
    let Some(node) = node else { return out };
    let at = TimeNode { node, layer: 0 };
    if let Some(c) = cfg.commodity_with_role(CommodityRole::Plant) {
        out.push(GridDemand { player, commodity: c, at, amount: p.isru_plant_mass });
    }
    if let Some(c) = cfg.commodity_with_role(CommodityRole::Spares) {
        let spares = crate::physics::maintenance_demand(p.isru_plant_mass, cfg.maintenance_rate) * cfg.initial_spares_years;
        if spares > 0.0 {
            out.push(GridDemand { player, commodity: c, at, amount: spares });
        }
    }
    out
}

/// Deployment entries for a player carrying `share` of D per window.
fn deployment_entries(cfg: &ScenarioConfig, player: usize, share: f64) -> Vec<GridDemand> {
    let mut out = Vec::new();
    let amount = share * cfg.deployment_demand_total;
    if amount <= 0.0 {
        return out;
    }
    let dep = &cfg.deployment;
    let (Some(c), Some(from), Some(to)) =
        (cfg.commodity_index(&dep.commodity), cfg.node_index(&dep.release_node), cfg.node_index(&dep.due_node))
    else {
        return out;
    };
    let step = cfg.time_grid.step;
    for (&r, &d) in dep.release_days.iter().zip(&dep.due_days) {
        out.push(GridDemand { player, commodity: c, at: TimeNode { node: from, layer: layer_for(r, amount, step) }, amount });
        out.push(GridDemand { player, commodity: c, at: TimeNode { node: to, layer: layer_for(d, -amount, step) }, amount: -amount });
    }
    out
}

/// All demands and supplies per player once a participation vector is fixed:
/// own entries, pre-deployed plant, and the deployment share.
pub fn inject_alpha_demand(cfg: &ScenarioConfig, alpha: &[f64]) -> Result<Vec<Vec<GridDemand>>, Error> {
    let shares = deployment_shares(cfg, alpha)?;
    Ok((0..cfg.players.len())
        .map(|p| {
            let mut d = expand_demands(cfg, p);
            d.extend(plant_supplies(cfg, p));
            d.extend(deployment_entries(cfg, p, shares[p]));
            d
        })
        .collect())
}

/// Every player at its mission fleet.
pub fn all_participants(cfg: &ScenarioConfig) -> Vec<Participant> {
    cfg.players.iter().enumerate().map(|(player, p)| Participant { player, fleet: p.fleet_per_mission }).collect()
}

/// Builds the model for all players.
pub fn assemble_milp(cfg: &ScenarioConfig, alpha: &AlphaSpec, mode: ObjectiveMode) -> Result<Formulation, Error> {
    assemble_with(cfg, &all_participants(cfg), alpha, mode, AssemblyOptions::default())
}

fn add_expr(map: &mut HashMap<VarId, f64>, v: VarId, c: f64) {
    *map.entry(v).or_insert(0.0) += c;
}

fn to_expr(map: HashMap<VarId, f64>) -> LinearExpr {
    let mut terms: Vec<(VarId, f64)> = map.into_iter().filter(|&(_, c)| c != 0.0).collect();
    terms.sort_by_key(|&(v, _)| v);
    LinearExpr { terms, constant: 0.0 }
}

/// Builds the model for a subset of players with explicit fleet caps.
pub fn assemble_with(
    cfg: &ScenarioConfig,
    participants: &[Participant],
    alpha: &AlphaSpec,
    mode: ObjectiveMode,
    options: AssemblyOptions,
) -> Result<Formulation, Error> {
    let commercial = cfg.commercial_indices();
    let nc = cfg.commodities.len();
    let nv = cfg.spacecraft.len();
    let mut problem = MilpProblem::new(match mode {
        ObjectiveMode::MinTotalCost => Sense::Minimize,
        ObjectiveMode::MaxWelfare { .. } => Sense::Maximize,
    })
    .named(cfg.name.clone());

    // participation variables and shares
    let mut alpha_vars = Vec::new();
    let shares: Vec<Share> = match alpha {
        AlphaSpec::Fixed(a) => {
            let s = deployment_shares(cfg, a)?;
            s.into_iter().map(|constant| Share { constant, terms: Vec::new() }).collect()
        }
        AlphaSpec::PlayerShares(s) => {
            if s.len() != cfg.players.len() || s.iter().any(|x| !(0.0..=1.0 + 1e-12).contains(x)) {
                return Err(Error::Argument(format!("player shares {s:?} must be one value in [0, 1] per player")));
            }
            s.iter().map(|&constant| Share { constant, terms: Vec::new() }).collect()
        }
        AlphaSpec::Free { lower } => {
            let active: Vec<usize> =
                commercial.iter().copied().filter(|c| participants.iter().any(|p| p.player == *c)).collect();
            for &k in &commercial {
                let upper = if active.contains(&k) { 1.0 } else { 0.0 };
                let lo = lower.min(upper);
                let v = problem.add_var(Variable::continuous(format!("alpha[{}]", cfg.players[k].id)).with_lower(lo).with_upper(upper));
                alpha_vars.push(v);
            }
            if !alpha_vars.is_empty() {
                problem.add_constraint(
                    "alpha_simplex",
                    LinearExpr::from(alpha_vars.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>()),
                    Relation::Le,
                    1.0,
                );
            }
            cfg.players
                .iter()
                .enumerate()
                .map(|(i, p)| match p.role {
                    Role::Coordinator => Share { constant: 1.0, terms: alpha_vars.iter().map(|&v| (v, -1.0)).collect() },
                    Role::Commercial => {
                        let k = commercial.iter().position(|&c| c == i).unwrap();
                        Share { constant: 0.0, terms: vec![(alpha_vars[k], 1.0)] }
                    }
                })
                .collect()
        }
    };

    let mut networks = Vec::new();
    let mut flows = Vec::new();
    let mut flow_costs = Vec::new();
    let mut all_demands = Vec::new();
    let mut cost_expr: HashMap<VarId, f64> = HashMap::new();

    for part in participants {
        let pz = part.player;
        let player = &cfg.players[pz];
        let net = expand_for_player(cfg, Some(&player.id));
        let nl = net.times.len();
        let nn = net.num_nodes;
        let ne = net.edges.len();
        let state = |c: usize, node: usize, layer: usize| (c * nn + node) * nl + layer;

        // demands: own + plant + fixed deployment
        let share = &shares[pz];
        let mut demands = expand_demands(cfg, pz);
        demands.extend(plant_supplies(cfg, pz));
        if share.terms.is_empty() {
            demands.extend(deployment_entries(cfg, pz, share.constant));
        }
        let mut rhs = vec![0.0; nc * nn * nl];
        for d in &demands {
            rhs[state(d.commodity, d.at.node, d.at.layer)] += d.amount;
        }
        // deployment as a function of the participation variables
        let mut alpha_rows: HashMap<usize, (f64, Vec<(VarId, f64)>)> = HashMap::new();
        if !share.terms.is_empty() {
            let dep = &cfg.deployment;
            if let (Some(c), Some(from), Some(to)) =
                (cfg.commodity_index(&dep.commodity), cfg.node_index(&dep.release_node), cfg.node_index(&dep.due_node))
            {
                let dtot = cfg.deployment_demand_total;
                let step = cfg.time_grid.step;
                for (&r, &d) in dep.release_days.iter().zip(&dep.due_days) {
                    for (node, day, sign) in [(from, r, 1.0), (to, d, -1.0)] {
                        let layer = layer_for(day, sign, step);
                        let e = alpha_rows.entry(state(c, node, layer)).or_insert((0.0, Vec::new()));
                        e.0 += sign * dtot * share.constant;
                        for &(v, a) in &share.terms {
                            e.1.push((v, sign * dtot * a));
                        }
                    }
                }
            }
        }

        let supply: Vec<bool> = (0..rhs.len())
            .map(|s| rhs[s] > 0.0 || alpha_rows.get(&s).is_some_and(|(k, t)| *k > 0.0 || t.iter().any(|&(_, a)| a > 0.0)))
            .collect();
        let demand: Vec<bool> = (0..rhs.len())
            .map(|s| rhs[s] < 0.0 || alpha_rows.get(&s).is_some_and(|(k, t)| *k < 0.0 || t.iter().any(|&(_, a)| a < 0.0)))
            .collect();

        let rules: Vec<TransformRule> =
            (0..nv).flat_map(|v| net.edges.iter().map(move |e| (v, e))).map(|(v, e)| transform_rule(cfg, e, v)).collect();
        let keep = if options.prune {
            prune(&PruneInput { cfg, net: &net, vehicles: nv, rules: &rules, supply: &supply, demand: &demand })
        } else {
            vec![true; nv * ne * nc]
        };

        // flow variables
        let mut var_at: Vec<Option<VarId>> = vec![None; nv * ne * nc];
        let sc_comm = cfg.commodity_with_role(CommodityRole::Spacecraft);
        for v in 0..nv {
            for (e, edge) in net.edges.iter().enumerate() {
                for c in 0..nc {
                    let w = (v * ne + e) * nc + c;
                    if !keep[w] {
                        continue;
                    }
                    let is_sc = Some(c) == sc_comm;
                    let integer = is_sc && edge.kind != ArcKind::Holdover;
                    let mut var = Variable {
                        name: format!(
                            "x[{},{},{},{}>{}@{}]",
                            player.id,
                            cfg.spacecraft[v].id,
                            cfg.commodities[c].id,
                            cfg.nodes[edge.from].id,
                            cfg.nodes[edge.to].id,
                            net.times[edge.depart]
                        ),
                        domain: if integer { Domain::Integer } else { Domain::Continuous },
                        lower: 0.0,
                        upper: None,
                    };
                    if is_sc && edge.kind == ArcKind::Transport {
                        var.upper = Some(part.fleet as f64);
                    }
                    let id = problem.add_var(var);
                    var_at[w] = Some(id);
                    let costs = unit_costs(cfg, edge, v, c);
                    let unit: f64 = costs.iter().sum();
                    if unit != 0.0 {
                        add_expr(&mut cost_expr, id, unit);
                    }
                    flows.push((
                        FlowVariableKey {
                            player: pz,
                            vehicle: v,
                            from: edge.from,
                            to: edge.to,
                            day: net.times[edge.depart],
                            commodity: c,
                            edge: e,
                        },
                        id,
                    ));
                    flow_costs.push(costs);
                }
            }
        }

        // mass balance per (commodity, node, layer): out - G in <= d
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); nn * nl];
        let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); nn * nl];
        for (e, edge) in net.edges.iter().enumerate() {
            out_edges[edge.from * nl + edge.depart].push(e);
            in_edges[edge.to * nl + edge.arrive].push(e);
        }
        for c in 0..nc {
            for node in 0..nn {
                for layer in 0..nl {
                    let s = state(c, node, layer);
                    let mut bound = rhs[s];
                    if bound == f64::INFINITY {
                        continue;
                    }
                    let mut expr: HashMap<VarId, f64> = HashMap::new();
                    for &e in &out_edges[node * nl + layer] {
                        for v in 0..nv {
                            if let Some(id) = var_at[(v * ne + e) * nc + c] {
                                add_expr(&mut expr, id, 1.0);
                            }
                        }
                    }
                    for &e in &in_edges[node * nl + layer] {
                        for v in 0..nv {
                            let rule = &rules[v * ne + e];
                            for (ci, &g) in rule.coef[c].iter().enumerate() {
                                if g != 0.0 {
                                    if let Some(id) = var_at[(v * ne + e) * nc + ci] {
                                        add_expr(&mut expr, id, -g);
                                    }
                                }
                            }
                        }
                    }
                    if let Some((k, terms)) = alpha_rows.get(&s) {
                        bound += k;
                        for &(v, a) in terms {
                            add_expr(&mut expr, v, -a);
                        }
                    }
                    let empty = expr.values().all(|&a| a == 0.0);
                    if empty && bound >= 0.0 {
                        continue;
                    }
                    problem.add_constraint(
                        format!("balance[{},{},{}@{}]", player.id, cfg.commodities[c].id, cfg.nodes[node].id, net.times[layer]),
                        to_expr(expr),
                        Relation::Le,
                        bound,
                    );
                }
            }
        }

        // per-edge concurrency and consumption rows
        let fuel = cfg.commodity_with_role(CommodityRole::Fuel);
        let ox = cfg.commodity_with_role(CommodityRole::Oxidizer);
        let plant = cfg.commodity_with_role(CommodityRole::Plant);
        let spares = cfg.commodity_with_role(CommodityRole::Spares);
        for v in 0..nv {
            let spec = &cfg.spacecraft[v];
            for (e, edge) in net.edges.iter().enumerate() {
                let at = |c: Option<usize>| c.and_then(|c| var_at[(v * ne + e) * nc + c]);
                let tag = format!("{},{},{}>{}@{}", player.id, spec.id, cfg.nodes[edge.from].id, cfg.nodes[edge.to].id, net.times[edge.depart]);
                let rule = &rules[v * ne + e];
                if edge.kind == ArcKind::Transport && !edge.launch_priced {
                    if (0..nc).all(|c| var_at[(v * ne + e) * nc + c].is_none()) {
                        continue;
                    }
                    // propellant on board covers the burn of the whole wet mass
                    for (name, t) in [("fuel", fuel), ("oxidizer", ox)] {
                        let Some(t) = t else { continue };
                        let mut expr = HashMap::new();
                        for c in 0..nc {
                            let burn = if c == t { 1.0 - rule.coef[t][c] } else { -rule.coef[t][c] };
                            if let Some(id) = var_at[(v * ne + e) * nc + c] {
                                add_expr(&mut expr, id, burn);
                            }
                        }
                        if let Some(id) = at(Some(t)) {
                            add_expr(&mut expr, id, -1.0);
                        }
                        problem.add_constraint(format!("{name}_burn[{tag}]"), to_expr(expr), Relation::Le, 0.0);
                    }
                    let sc_var = at(sc_comm);
                    let mut cap = HashMap::new();
                    for c in [fuel, ox] {
                        if let Some(id) = at(c) {
                            add_expr(&mut cap, id, 1.0);
                        }
                    }
                    if let Some(id) = sc_var {
                        add_expr(&mut cap, id, -spec.propellant_capacity);
                    }
                    problem.add_constraint(format!("tank[{tag}]"), to_expr(cap), Relation::Le, 0.0);
                    if let Some(pay) = spec.payload_capacity {
                        let mut expr = HashMap::new();
                        for c in 0..nc {
                            let role = cfg.commodities[c].role;
                            if matches!(role, CommodityRole::Fuel | CommodityRole::Oxidizer | CommodityRole::Spacecraft) {
                                continue;
                            }
                            if let Some(id) = var_at[(v * ne + e) * nc + c] {
                                add_expr(&mut expr, id, 1.0);
                            }
                        }
                        if let Some(id) = sc_var {
                            add_expr(&mut expr, id, -pay);
                        }
                        if !expr.is_empty() {
                            problem.add_constraint(format!("payload[{tag}]"), to_expr(expr), Relation::Le, 0.0);
                        }
                    }
                }
                if let (Some(p), Some(s)) = (plant, spares) {
                    let use_rate = -rule.coef[s][p];
                    if use_rate > 0.0 {
                        if let Some(pid) = at(Some(p)) {
                            let mut expr = HashMap::new();
                            add_expr(&mut expr, pid, use_rate);
                            if let Some(sid) = at(Some(s)) {
                                add_expr(&mut expr, sid, -1.0);
                            }
                            problem.add_constraint(format!("spares[{tag}]"), to_expr(expr), Relation::Le, 0.0);
                        }
                    }
                }
            }
        }

        networks.push(net);
        let mut used = demands;
        used.retain(|d| d.amount != 0.0);
        all_demands.push(used);
    }

    let cost = to_expr(cost_expr);
    match mode {
        ObjectiveMode::MinTotalCost => problem.objective = cost,
        ObjectiveMode::MaxWelfare { baseline, own_costs } => {
            let mut obj = LinearExpr::constant(baseline + own_costs);
            for &(v, c) in &cost.terms {
                obj.add_term(v, -c);
            }
            problem.objective = obj;
            problem.add_constraint("budget", cost, Relation::Le, baseline + own_costs);
        }
    }

    Ok(Formulation { problem, participants: participants.to_vec(), networks, flows, flow_costs, alpha_vars, demands: all_demands, mode })
}

/// Deployment entries per player for explicit shares.
pub(crate) fn deployment_for(cfg: &ScenarioConfig, shares: &[f64]) -> Vec<Vec<GridDemand>> {
    shares.iter().enumerate().map(|(p, &s)| deployment_entries(cfg, p, s)).collect()
}
