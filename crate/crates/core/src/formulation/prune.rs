//! Drops flow variables that are zero in every feasible solution
//! (unreachable from any supply) or that can be zeroed without losing
//! feasibility or raising cost (they never feed a demand).

use crate::model::{ArcKind, CommodityRole, ScenarioConfig, TimeExpandedNetwork};

use super::TransformRule;

pub(crate) struct PruneInput<'a> {
    pub cfg: &'a ScenarioConfig,
    pub net: &'a TimeExpandedNetwork,
    pub vehicles: usize,
    /// rules[v * edges + e]
    pub rules: &'a [TransformRule],
    /// state index (c, node, layer) -> supply may be positive
    pub supply: &'a [bool],
    /// state index -> a demand must be met
    pub demand: &'a [bool],
}

impl PruneInput<'_> {
    fn layers(&self) -> usize {
        self.net.times.len()
    }

    pub fn state(&self, c: usize, node: usize, layer: usize) -> usize {
        (c * self.net.num_nodes + node) * self.layers() + layer
    }
}

/// Returns keep[(v * edges + e) * commodities + c].
pub(crate) fn prune(input: &PruneInput) -> Vec<bool> {
    let cfg = input.cfg;
    let nc = cfg.commodities.len();
    let ne = input.net.edges.len();
    let nv = input.vehicles;
    let var = |v: usize, e: usize, c: usize| (v * ne + e) * nc + c;
    let fuel = cfg.commodity_with_role(CommodityRole::Fuel);
    let ox = cfg.commodity_with_role(CommodityRole::Oxidizer);
    let sc = cfg.commodity_with_role(CommodityRole::Spacecraft);
    let plant = cfg.commodity_with_role(CommodityRole::Plant);
    let spares = cfg.commodity_with_role(CommodityRole::Spares);

    // transport edges that burn propellant need fuel, oxidiser and a spacecraft on board
    let needs_vehicle: Vec<bool> = (0..nv)
        .flat_map(|v| {
            input.net.edges.iter().map(move |e| {
                e.kind == ArcKind::Transport
                    && !e.launch_priced
                    && (e.delta_v > 0.0 || cfg.spacecraft[v].payload_capacity.is_some())
            })
        })
        .collect();

    let mut reach_state = input.supply.to_vec();
    let mut reach_var = vec![false; nv * ne * nc];
    loop {
        let mut changed = false;
        for v in 0..nv {
            for (e, edge) in input.net.edges.iter().enumerate() {
                let tail = |c: usize, reach: &[bool]| reach[input.state(c, edge.from, edge.depart)];
                if needs_vehicle[v * ne + e] && ![fuel, ox, sc].iter().all(|c| c.is_some_and(|c| tail(c, &reach_state))) {
                    continue;
                }
                let rule = &input.rules[v * ne + e];
                for c in 0..nc {
                    if reach_var[var(v, e, c)] || !tail(c, &reach_state) {
                        continue;
                    }
                    reach_var[var(v, e, c)] = true;
                    changed = true;
                    for (out, row) in rule.coef.iter().enumerate() {
                        if row[c] > 0.0 {
                            let s = input.state(out, edge.to, edge.arrive);
                            reach_state[s] = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut useful_state = input.demand.to_vec();
    let mut useful_var = vec![false; nv * ne * nc];
    loop {
        let mut changed = false;
        for v in 0..nv {
            for (e, edge) in input.net.edges.iter().enumerate() {
                let rule = &input.rules[v * ne + e];
                let mark = |c: usize, useful_var: &mut Vec<bool>, useful_state: &mut Vec<bool>| {
                    let w = var(v, e, c);
                    if reach_var[w] && !useful_var[w] {
                        useful_var[w] = true;
                        useful_state[input.state(c, edge.from, edge.depart)] = true;
                        true
                    } else {
                        false
                    }
                };
                let mut delivers = false;
                for c in 0..nc {
                    if !reach_var[var(v, e, c)] {
                        continue;
                    }
                    let feeds = rule
                        .coef
                        .iter()
                        .enumerate()
                        .any(|(out, row)| row[c] > 0.0 && useful_state[input.state(out, edge.to, edge.arrive)]);
                    if feeds {
                        delivers = true;
                        changed |= mark(c, &mut useful_var, &mut useful_state);
                    }
                }
                if delivers && edge.kind == ArcKind::Transport {
                    for c in [fuel, ox, sc].into_iter().flatten() {
                        changed |= mark(c, &mut useful_var, &mut useful_state);
                    }
                }
                if let (Some(p), Some(s)) = (plant, spares) {
                    if useful_var[var(v, e, p)] && rule.coef[s][p] < 0.0 {
                        changed |= mark(s, &mut useful_var, &mut useful_state);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    useful_var
}
