//! Rechecks of optimal flows against the physics, computed without the
//! solver's constraint rows.

use crate::model::{ArcKind, CommodityRole, GridDemand, ScenarioConfig};
use crate::physics;

use super::{deployment_shares, transform_rule, unit_masses, Formulation};

/// A violated physical rule, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub what: String,
    pub detail: String,
}

fn alpha_values(form: &Formulation, values: &[f64]) -> Vec<f64> {
    form.alpha_vars.iter().map(|v| values[v.0]).collect()
}

/// Demands per participant including the deployment share picked by the
/// solver when participation is a decision variable.
fn effective_demands(cfg: &ScenarioConfig, form: &Formulation, values: &[f64]) -> Vec<Vec<GridDemand>> {
    let mut out = form.demands.clone();
    if form.alpha_vars.is_empty() {
        return out;
    }
    let alpha = alpha_values(form, values);
    let Ok(shares) = deployment_shares(cfg, &alpha) else { return out };
    let injected = super::assemble::deployment_for(cfg, &shares);
    for (k, p) in form.participants.iter().enumerate() {
        out[k].extend(injected[p.player].iter().copied());
    }
    out
}

/// Mass balance at every (player, commodity, node, layer): transformed
/// inflow plus supply covers outflow plus demand.
pub fn check_mass_balance(cfg: &ScenarioConfig, form: &Formulation, values: &[f64], tol: f64) -> Vec<Violation> {
    let nc = cfg.commodities.len();
    let demands = effective_demands(cfg, form, values);
    let mut bad = Vec::new();
    for (k, part) in form.participants.iter().enumerate() {
        let net = &form.networks[k];
        let nl = net.times.len();
        let idx = |c: usize, node: usize, layer: usize| (c * net.num_nodes + node) * nl + layer;
        let mut net_in = vec![0.0; nc * net.num_nodes * nl];
        let mut scale = vec![0.0f64; net_in.len()];
        for d in &demands[k] {
            let s = idx(d.commodity, d.at.node, d.at.layer);
            net_in[s] += d.amount;
            scale[s] = scale[s].max(d.amount.abs());
        }
        let mut entering: Vec<Vec<f64>> = vec![vec![0.0; nc]; cfg.spacecraft.len() * net.edges.len()];
        for (key, var) in form.flows.iter().filter(|(key, _)| key.player == part.player) {
            entering[key.vehicle * net.edges.len() + key.edge][key.commodity] = values[var.0];
        }
        for (w, x) in entering.iter().enumerate() {
            if x.iter().all(|&a| a == 0.0) {
                continue;
            }
            let (v, e) = (w / net.edges.len(), w % net.edges.len());
            let edge = &net.edges[e];
            let delivered = transform_rule(cfg, edge, v).apply(x);
            for c in 0..nc {
                let s_out = idx(c, edge.from, edge.depart);
                let s_in = idx(c, edge.to, edge.arrive);
                net_in[s_out] -= x[c];
                net_in[s_in] += delivered[c];
                scale[s_out] = scale[s_out].max(x[c].abs());
                scale[s_in] = scale[s_in].max(delivered[c].abs());
            }
        }
        for c in 0..nc {
            for node in 0..net.num_nodes {
                for layer in 0..nl {
                    let s = idx(c, node, layer);
                    if net_in[s].is_nan() || net_in[s] < -tol * scale[s].max(1.0) {
                        bad.push(Violation {
                            what: "mass balance".into(),
                            detail: format!(
                                "{} {} at {} day {}: short by {:.6}",
                                cfg.players[part.player].id, cfg.commodities[c].id, cfg.nodes[node].id, net.times[layer], -net_in[s]
                            ),
                        });
                    }
                }
            }
        }
    }
    bad
}

/// Per transport edge in use: the propellant that disappears equals the
/// rocket-equation burn of the departing wet mass, in the configured split,
/// and the propellant carried covers it.
pub fn check_rocket_equation(cfg: &ScenarioConfig, form: &Formulation, values: &[f64], rel_tol: f64) -> Vec<Violation> {
    let fuel = cfg.commodity_with_role(CommodityRole::Fuel);
    let ox = cfg.commodity_with_role(CommodityRole::Oxidizer);
    let nc = cfg.commodities.len();
    let mut bad = Vec::new();
    for (k, part) in form.participants.iter().enumerate() {
        let net = &form.networks[k];
        let ne = net.edges.len();
        let mut entering: Vec<Vec<f64>> = vec![vec![0.0; nc]; cfg.spacecraft.len() * ne];
        for (key, var) in form.flows.iter().filter(|(key, _)| key.player == part.player) {
            entering[key.vehicle * ne + key.edge][key.commodity] = values[var.0];
        }
        for (w, x) in entering.iter().enumerate() {
            let (v, e) = (w / ne, w % ne);
            let edge = &net.edges[e];
            if edge.kind != ArcKind::Transport || edge.launch_priced || x.iter().all(|&a| a == 0.0) {
                continue;
            }
            let spec = &cfg.spacecraft[v];
            let wet: f64 = unit_masses(cfg, v).iter().zip(x).map(|(m, a)| m * a).sum();
            let Ok(burn) = physics::propellant_burn(wet, edge.delta_v, spec.isp) else {
                bad.push(Violation { what: "rocket equation".into(), detail: format!("negative wet mass {wet}") });
                continue;
            };
            let (want_h2, want_o2) = physics::burn_split(burn, spec.ox_fuel_ratio);
            let delivered = transform_rule(cfg, edge, v).apply(x);
            let tag = format!("{} {}>{} day {}", cfg.players[part.player].id, cfg.nodes[edge.from].id, cfg.nodes[edge.to].id, net.times[edge.depart]);
            for (c, want) in [(fuel, want_h2), (ox, want_o2)] {
                let Some(c) = c else { continue };
                let used = x[c] - delivered[c];
                if (used - want).abs() > rel_tol * want.abs().max(1.0) {
                    bad.push(Violation {
                        what: "rocket equation".into(),
                        detail: format!("{tag}: {} decrement {used} vs burn {want}", cfg.commodities[c].id),
                    });
                }
                if x[c] < want - rel_tol * want.abs().max(1.0) {
                    bad.push(Violation {
                        what: "propellant on board".into(),
                        detail: format!("{tag}: carries {} {} for a burn of {want}", x[c], cfg.commodities[c].id),
                    });
                }
            }
        }
    }
    bad
}

/// ISRU holdovers produce exactly the electrolysis output of the plant
/// mass sitting there for one step.
pub fn check_isru_stoichiometry(cfg: &ScenarioConfig, form: &Formulation, values: &[f64], rel_tol: f64) -> Vec<Violation> {
    let (Some(fuel), Some(ox), Some(plant)) = (
        cfg.commodity_with_role(CommodityRole::Fuel),
        cfg.commodity_with_role(CommodityRole::Oxidizer),
        cfg.commodity_with_role(CommodityRole::Plant),
    ) else {
        return Vec::new();
    };
    let nc = cfg.commodities.len();
    let mut bad = Vec::new();
    for (key, var) in &form.flows {
        if key.commodity != plant || values[var.0] == 0.0 {
            continue;
        }
        let k = form.participants.iter().position(|p| p.player == key.player).unwrap();
        let edge = &form.networks[k].edges[key.edge];
        if edge.kind != ArcKind::Holdover || !cfg.nodes[edge.from].isru_capable {
            continue;
        }
        let mass = values[var.0];
        let y = physics::isru_yield(mass, cfg.time_grid.step as f64, cfg.isru_productivity, cfg.spacecraft[key.vehicle].ox_fuel_ratio);
        let o2 = if cfg.retain_excess_o2 { y.o2_usable + y.o2_excess } else { y.o2_usable };
        let mut x = vec![0.0; nc];
        x[plant] = mass;
        let produced = transform_rule(cfg, edge, key.vehicle).apply(&x);
        for (c, want) in [(fuel, y.h2), (ox, o2)] {
            if (produced[c] - want).abs() > rel_tol * want.abs().max(1.0) {
                bad.push(Violation {
                    what: "isru stoichiometry".into(),
                    detail: format!("{} plant {mass} kg: {} {} vs {want}", cfg.nodes[edge.from].id, cfg.commodities[c].id, produced[c]),
                });
            }
        }
    }
    bad
}

/// All physics rechecks at once.
pub fn verify_solution(cfg: &ScenarioConfig, form: &Formulation, values: &[f64]) -> Vec<Violation> {
    let mut v = check_mass_balance(cfg, form, values, 1e-6);
    v.extend(check_rocket_equation(cfg, form, values, 1e-6));
    v.extend(check_isru_stoichiometry(cfg, form, values, 1e-6));
    v
}
