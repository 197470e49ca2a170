//! Time-expanded multi-commodity flow MILP: mass balance with commodity
//! transformations, spacecraft concurrency rows, time windows and costs.

mod assemble;
mod cost;
mod flows;
mod prune;
mod verify;

pub use assemble::*;
pub use cost::*;
pub use flows::*;
pub use verify::*;

use crate::model::{ArcKind, CommodityRole, ExpandedEdge, ScenarioConfig};
use crate::physics;

/// Identifies one flow variable: commodity `commodity` carried by `player`
/// on a spacecraft of class `vehicle` along expanded edge `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowVariableKey {
    pub player: usize,
    pub vehicle: usize,
    pub from: usize,
    pub to: usize,
    /// Departure day.
    pub day: u32,
    pub commodity: usize,
    /// Index into the player's expanded edge list.
    pub edge: usize,
}

/// Linear map from the commodity vector entering an edge to the vector
/// delivered at its head: `delivered[o] = sum_i coef[o][i] * entering[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRule {
    pub coef: Vec<Vec<f64>>,
}

impl TransformRule {
    pub fn identity(n: usize) -> Self {
        let mut coef = vec![vec![0.0; n]; n];
        for (i, row) in coef.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        TransformRule { coef }
    }

    pub fn apply(&self, entering: &[f64]) -> Vec<f64> {
        self.coef.iter().map(|row| row.iter().zip(entering).map(|(a, x)| a * x).sum()).collect()
    }
}

/// Mass in kg of one unit of each commodity; spacecraft count as dry mass.
pub fn unit_masses(cfg: &ScenarioConfig, vehicle: usize) -> Vec<f64> {
    cfg.commodities
        .iter()
        .map(|c| if c.role == CommodityRole::Spacecraft { cfg.spacecraft[vehicle].dry_mass } else { 1.0 })
        .collect()
}

/// ISRU output per kg of plant per grid step: (H2, O2 kept).
pub fn isru_step_yield(cfg: &ScenarioConfig, vehicle: usize) -> (f64, f64) {
    let sc = &cfg.spacecraft[vehicle];
    let y = physics::isru_yield(1.0, cfg.time_grid.step as f64, cfg.isru_productivity, sc.ox_fuel_ratio);
    let o2 = if cfg.retain_excess_o2 { y.o2_usable + y.o2_excess } else { y.o2_usable };
    (y.h2, o2)
}

/// Spares consumed per kg of plant per grid step.
pub fn maintenance_step(cfg: &ScenarioConfig) -> f64 {
    physics::maintenance_demand(1.0, cfg.maintenance_rate) * cfg.time_grid.step as f64 / 365.0
}

/// The commodity transformation along one expanded edge.
pub fn transform_rule(cfg: &ScenarioConfig, edge: &ExpandedEdge, vehicle: usize) -> TransformRule {
    let n = cfg.commodities.len();
    let mut rule = TransformRule::identity(n);
    let fuel = cfg.commodity_with_role(CommodityRole::Fuel);
    let ox = cfg.commodity_with_role(CommodityRole::Oxidizer);
    match edge.kind {
        ArcKind::Transport if !edge.launch_priced => {
            let sc = &cfg.spacecraft[vehicle];
            let phi = physics::burn_fraction(edge.delta_v, sc.isp);
            let (fh, fo) = physics::burn_split(phi, sc.ox_fuel_ratio);
            let mass = unit_masses(cfg, vehicle);
            for (target, frac) in [(fuel, fh), (ox, fo)] {
                if let Some(t) = target {
                    for (i, m) in mass.iter().enumerate() {
                        rule.coef[t][i] -= frac * m;
                    }
                }
            }
        }
        ArcKind::Holdover if cfg.nodes[edge.from].isru_capable => {
            if let Some(plant) = cfg.commodity_with_role(CommodityRole::Plant) {
                let (yh, yo) = isru_step_yield(cfg, vehicle);
                if let Some(f) = fuel {
                    rule.coef[f][plant] += yh;
                }
                if let Some(o) = ox {
                    rule.coef[o][plant] += yo;
                }
                if let Some(sp) = cfg.commodity_with_role(CommodityRole::Spares) {
                    rule.coef[sp][plant] -= maintenance_step(cfg);
                }
            }
        }
        _ => {}
    }
    rule
}

/// Cost categories of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostComponent {
    Launch,
    SpacecraftAcquisition,
    FlightOps,
    PropellantPurchase,
}

impl CostComponent {
    pub const ALL: [CostComponent; 4] =
        [CostComponent::Launch, CostComponent::SpacecraftAcquisition, CostComponent::FlightOps, CostComponent::PropellantPurchase];

    pub fn label(self) -> &'static str {
        match self {
            CostComponent::Launch => "launch",
            CostComponent::SpacecraftAcquisition => "spacecraft",
            CostComponent::FlightOps => "flight_ops",
            CostComponent::PropellantPurchase => "propellant",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Per-unit cost of a flow variable, split by component.
pub fn unit_costs(cfg: &ScenarioConfig, edge: &ExpandedEdge, vehicle: usize, commodity: usize) -> [f64; 4] {
    let mut out = [0.0; 4];
    let cm = &cfg.cost_model;
    let role = cfg.commodities[commodity].role;
    if edge.launch_priced {
        let mass = unit_masses(cfg, vehicle)[commodity];
        out[CostComponent::Launch.index()] += cm.launch_cost * mass;
        match role {
            CommodityRole::Spacecraft => out[CostComponent::SpacecraftAcquisition.index()] += cfg.spacecraft_price(vehicle),
            CommodityRole::Fuel => out[CostComponent::PropellantPurchase.index()] += cm.h2_price,
            CommodityRole::Oxidizer => out[CostComponent::PropellantPurchase.index()] += cm.o2_price,
            _ => {}
        }
    } else if edge.kind == ArcKind::Transport && role == CommodityRole::Spacecraft {
        out[CostComponent::FlightOps.index()] += cm.flight_ops_cost;
    }
    out
}
