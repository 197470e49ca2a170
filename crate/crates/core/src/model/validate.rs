use std::collections::HashSet;
use std::fmt;

use super::config::*;

/// One violated invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

struct Report(Vec<Diagnostic>);

impl Report {
    fn push(&mut self, entity: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { entity: entity.into(), message: message.into() });
    }

    fn unique<'a>(&mut self, what: &str, ids: impl Iterator<Item = &'a str>) {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id) {
                self.push(format!("{what} {id}"), format!("{what} ids must be unique"));
            }
        }
    }
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Checks every invariant of the scenario types. Empty means valid.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Vec<Diagnostic> {
    let mut r = Report(Vec::new());
    if cfg.schema_version != SCHEMA_VERSION {
        r.push("schema_version", format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.schema_version));
    }

    r.unique("node", cfg.nodes.iter().map(|n| n.id.as_str()));
    let node_ok = |id: &str| cfg.node_index(id).is_some();

    let grid = &cfg.time_grid;
    if grid.step == 0 {
        r.push("time_grid", "step must be positive");
    } else if !grid.horizon.is_multiple_of(grid.step) {
        r.push("time_grid", format!("horizon {} is not divisible by step {}", grid.horizon, grid.step));
    }

    for (k, a) in cfg.arcs.iter().enumerate() {
        let name = format!("arc #{k} {}->{}", a.from, a.to);
        for end in [&a.from, &a.to] {
            if !node_ok(end) {
                r.push(&name, format!("unknown node id `{end}`"));
            }
        }
        if !(a.delta_v.is_finite() && a.delta_v >= 0.0) {
            r.push(&name, "delta_v must be finite and >= 0");
        }
        match a.kind {
            ArcKind::Holdover => {
                if a.from != a.to {
                    r.push(&name, "holdover arcs connect a node to itself");
                }
                if a.delta_v != 0.0 {
                    r.push(&name, "holdover arcs have zero delta_v");
                }
                if a.tof != grid.step {
                    r.push(&name, "holdover arcs last exactly one time step");
                }
            }
            ArcKind::Transport | ArcKind::Launch => {
                if a.from == a.to {
                    r.push(&name, "transport arcs connect distinct nodes");
                }
            }
        }
        if a.launch_priced && a.kind != ArcKind::Launch {
            r.push(&name, "only launch arcs can be launch priced");
        }
    }

    r.unique("commodity", cfg.commodities.iter().map(|c| c.id.as_str()));
    for role in [CommodityRole::Fuel, CommodityRole::Oxidizer, CommodityRole::Spacecraft] {
        let n = cfg.commodities.iter().filter(|c| c.role == role).count();
        if n != 1 {
            r.push("commodities", format!("exactly one commodity with role {role:?} is required, found {n}"));
        }
    }
    for role in [CommodityRole::Plant, CommodityRole::Spares, CommodityRole::Water] {
        if cfg.commodities.iter().filter(|c| c.role == role).count() > 1 {
            r.push("commodities", format!("at most one commodity with role {role:?}"));
        }
    }
    for c in &cfg.commodities {
        if c.role == CommodityRole::Spacecraft && c.domain != CommodityDomain::Discrete {
            r.push(format!("commodity {}", c.id), "the spacecraft-unit commodity is discrete");
        }
        if c.role != CommodityRole::Spacecraft && c.domain == CommodityDomain::Discrete {
            r.push(format!("commodity {}", c.id), "only the spacecraft-unit commodity may be discrete");
        }
    }

    if cfg.spacecraft.is_empty() {
        r.push("spacecraft", "at least one spacecraft class is required");
    }
    r.unique("spacecraft", cfg.spacecraft.iter().map(|s| s.id.as_str()));
    for s in &cfg.spacecraft {
        let name = format!("spacecraft {}", s.id);
        if !(s.dry_mass > 0.0 && s.dry_mass.is_finite()) {
            r.push(&name, "dry_mass must be > 0");
        }
        if !(s.propellant_capacity > 0.0 && s.propellant_capacity.is_finite()) {
            r.push(&name, "propellant_capacity must be > 0");
        }
        if s.payload_capacity.is_some_and(|p| !(p > 0.0)) {
            r.push(&name, "payload_capacity must be > 0 when given");
        }
        if !(s.isp > 0.0 && s.isp.is_finite()) {
            r.push(&name, "isp must be > 0");
        }
        if !(s.ox_fuel_ratio > 0.0 && s.ox_fuel_ratio.is_finite()) {
            r.push(&name, "ox_fuel_ratio must be > 0");
        }
        if s.unit_cost.is_some_and(|c| !finite_nonneg(c)) {
            r.push(&name, "unit_cost must be >= 0");
        }
    }

    let cm = &cfg.cost_model;
    for (field, v) in [
        ("launch_cost", cm.launch_cost),
        ("spacecraft_unit_cost", cm.spacecraft_unit_cost),
        ("flight_ops_cost", cm.flight_ops_cost),
        ("h2_price", cm.h2_price),
        ("o2_price", cm.o2_price),
    ] {
        if !finite_nonneg(v) {
            r.push(format!("cost_model.{field}"), "costs must be finite and >= 0");
        }
    }

    r.unique("player", cfg.players.iter().map(|p| p.id.as_str()));
    let coordinators = cfg.players.iter().filter(|p| p.role == Role::Coordinator).count();
    if coordinators != 1 {
        r.push("players", format!("exactly one coordinator is required, found {coordinators}"));
    }
    for p in &cfg.players {
        let name = format!("player {}", p.id);
        if !finite_nonneg(p.isru_plant_mass) {
            r.push(&name, "isru_plant_mass must be >= 0");
        }
        match &p.isru_node {
            Some(n) if !node_ok(n) => r.push(&name, format!("unknown node id `{n}`")),
            Some(n) if !cfg.nodes[cfg.node_index(n).unwrap()].isru_capable => {
                r.push(&name, format!("node `{n}` is not ISRU capable"))
            }
            None if p.isru_plant_mass > 0.0 && !cfg.nodes.iter().any(|n| n.isru_capable) => {
                r.push(&name, "a plant needs an ISRU-capable node")
            }
            _ => {}
        }
        for d in &p.own_demands {
            let ename = format!("{name} demand {}@{}", d.commodity, d.node);
            if cfg.commodity_index(&d.commodity).is_none() {
                r.push(&ename, format!("unknown commodity id `{}`", d.commodity));
            }
            if !node_ok(&d.node) {
                r.push(&ename, format!("unknown node id `{}`", d.node));
            }
            if let TimeSpec::Day(t) = d.time {
                if t > grid.horizon {
                    r.push(&ename, format!("time {t} is beyond the horizon {}", grid.horizon));
                }
            }
            if d.amount.is_nan() || d.amount == f64::NEG_INFINITY {
                r.push(&ename, "amount must be a number; only supplies may be infinite");
            }
            if d.repeat_every == Some(0) {
                r.push(&ename, "repeat_every must be positive");
            }
        }
    }

    for w in &grid.mission_windows {
        let name = format!("window {}->{}", w.from, w.to);
        if !cfg.arcs.iter().any(|a| a.from == w.from && a.to == w.to) {
            r.push(&name, "no such arc");
        }
        if let Some(pl) = &w.player {
            if cfg.player_index(pl).is_none() {
                r.push(&name, format!("unknown player id `{pl}`"));
            }
        }
        for iv in &w.open {
            if iv[0] > iv[1] || iv[1] > grid.horizon {
                r.push(&name, format!("interval [{}, {}] must be ordered and within the horizon", iv[0], iv[1]));
            }
        }
        if w.repeat_every == Some(0) {
            r.push(&name, "repeat_every must be positive");
        }
    }

    if !(cfg.deployment_demand_total > 0.0 && cfg.deployment_demand_total.is_finite()) {
        r.push("deployment_demand_total", "D must be > 0");
    }
    if !finite_nonneg(cfg.isru_productivity) {
        r.push("isru_productivity", "productivity must be >= 0");
    }
    if !(0.0..=1.0).contains(&cfg.maintenance_rate) {
        r.push("maintenance_rate", "maintenance rate must lie in [0, 1]");
    }
    if !finite_nonneg(cfg.initial_spares_years) {
        r.push("initial_spares_years", "must be >= 0");
    }

    let dep = &cfg.deployment;
    match cfg.commodity_index(&dep.commodity) {
        None => r.push("deployment", format!("unknown commodity id `{}`", dep.commodity)),
        Some(c) if cfg.commodities[c].role != CommodityRole::Payload => {
            r.push("deployment", "the deployed commodity must be a payload")
        }
        _ => {}
    }
    for n in [&dep.release_node, &dep.due_node] {
        if !node_ok(n) {
            r.push("deployment", format!("unknown node id `{n}`"));
        }
    }
    if dep.release_days.len() != dep.due_days.len() {
        r.push("deployment", "release_days and due_days must pair up one-to-one");
    }
    for (&a, &b) in dep.release_days.iter().zip(&dep.due_days) {
        if a > b || b > grid.horizon {
            r.push("deployment", format!("window released {a} due {b} must be ordered and within the horizon"));
        }
    }
    r.0
}
