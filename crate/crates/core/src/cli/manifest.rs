use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spacelog_milp::SolveStats;

use crate::error::Error;
use crate::model::ScenarioConfig;

/// Written next to every output set. Re-running the same command on inputs
/// with the same hashes reproduces the outputs byte for byte; only
/// `wall_time_seconds` differs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the scenario file, when one was used.
    pub config_hash: Option<String>,
    /// SHA-256 of every other input file, by path.
    pub input_hashes: BTreeMap<String, String>,
    pub command: Vec<String>,
    /// Effective global settings after flags and environment.
    pub flags: BTreeMap<String, Value>,
    pub wall_time_seconds: f64,
    pub solver: SolverSummary,
    pub outputs: Vec<String>,
    /// Model parameters the scenario file left unstated, with the values used.
    pub assumed_defaults: BTreeMap<String, Value>,
    /// Per-arc delta-v (km/s) and time of flight (days) as modelled.
    pub network: Vec<Value>,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SolverSummary {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub lp_solves: u64,
    /// Cost evaluations that ran the solver.
    pub cost_solves: usize,
}

impl SolverSummary {
    pub fn from_stats(s: &SolveStats, cost_solves: usize) -> Self {
        SolverSummary { nodes: s.nodes, lp_iterations: s.lp_iterations, lp_solves: s.lp_solves, cost_solves }
    }
}

impl RunManifest {
    pub fn new(command: Vec<String>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: None,
            input_hashes: BTreeMap::new(),
            command,
            flags: BTreeMap::new(),
            wall_time_seconds: 0.0,
            solver: SolverSummary::default(),
            outputs: Vec::new(),
            assumed_defaults: BTreeMap::new(),
            network: Vec::new(),
        }
    }

    /// Records the scenario file's hash, unstated defaults and network data.
    pub fn describe_config(&mut self, raw: &str, cfg: &ScenarioConfig) {
        self.config_hash = Some(sha256_hex(raw.as_bytes()));
        self.assumed_defaults = assumed_defaults(raw, cfg);
        self.network = cfg
            .arcs
            .iter()
            .map(|a| json!({ "from": a.from, "to": a.to, "kind": a.kind, "delta_v": a.delta_v, "tof": a.tof }))
            .collect();
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.input_hashes.insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, Error> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parameters absent from the scenario text, with the value the model used.
pub fn assumed_defaults(raw: &str, cfg: &ScenarioConfig) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    let Ok(table) = raw.parse::<toml::Table>() else { return out };
    let full = serde_json::to_value(cfg).unwrap_or(Value::Null);
    for key in [
        "name",
        "commodities",
        "spacecraft",
        "cost_model",
        "time_grid",
        "deployment_demand_total",
        "deployment",
        "isru_productivity",
        "maintenance_rate",
        "initial_spares_years",
        "retain_excess_o2",
    ] {
        if !table.contains_key(key) {
            out.insert(key.to_string(), full[key].clone());
        }
    }
    if let Some(cm) = table.get("cost_model").and_then(|v| v.as_table()) {
        for key in ["launch_cost", "spacecraft_unit_cost", "flight_ops_cost", "h2_price", "o2_price"] {
            if !cm.contains_key(key) {
                out.insert(format!("cost_model.{key}"), full["cost_model"][key].clone());
            }
        }
    }
    for s in &cfg.spacecraft {
        if s.payload_capacity.is_none() {
            out.insert(format!("spacecraft.{}.payload_capacity", s.id), json!("unbounded; limited by propellant and tank"));
        }
        if s.unit_cost.is_none() {
            out.insert(format!("spacecraft.{}.unit_cost", s.id), json!(cfg.cost_model.spacecraft_unit_cost));
        }
    }
    let raw_players = table.get("players").and_then(|v| v.as_array()).cloned().unwrap_or_default();
    for (p, raw_p) in cfg.players.iter().zip(raw_players) {
        let has = |k: &str| raw_p.as_table().is_some_and(|t| t.contains_key(k));
        if !has("fleet_per_mission") {
            out.insert(format!("players.{}.fleet_per_mission", p.id), json!(p.fleet_per_mission));
        }
        if !has("baseline_fleet") {
            out.insert(format!("players.{}.baseline_fleet", p.id), json!(p.baseline_fleet()));
        }
    }
    out
}
