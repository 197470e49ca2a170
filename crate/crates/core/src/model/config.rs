use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    BodySurface,
    Orbit,
    LagrangePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: String,
    pub kind: NodeKind,
    /// ISRU plants held over at this node produce propellant.
    #[serde(default)]
    pub isru_capable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    Transport,
    Holdover,
    Launch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkArc {
    pub from: String,
    pub to: String,
    pub kind: ArcKind,
    /// km/s
    #[serde(default)]
    pub delta_v: f64,
    /// Time of flight in whole days, rounded up to the grid step when expanded.
    #[serde(default)]
    pub tof: u32,
    /// Launch arcs are priced per kg instead of by the rocket equation.
    #[serde(default)]
    pub launch_priced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommodityDomain {
    Continuous,
    Discrete,
}

/// What a commodity does in the physics. Payload commodities only move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommodityRole {
    Payload,
    Fuel,
    Oxidizer,
    Water,
    Plant,
    Spares,
    Spacecraft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commodity {
    pub id: String,
    pub domain: CommodityDomain,
    pub role: CommodityRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacecraftSpec {
    pub id: String,
    pub dry_mass: f64,
    pub propellant_capacity: f64,
    /// `None` means payload is limited only by propellant physics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_capacity: Option<f64>,
    pub isp: f64,
    /// Falls back to the cost model's spacecraft price when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_cost: Option<f64>,
    /// O2:H2 mass ratio of the burn.
    pub ox_fuel_ratio: f64,
}

impl Default for SpacecraftSpec {
    fn default() -> Self {
        SpacecraftSpec {
            id: "tanker".into(),
            dry_mass: 6_000.0,
            propellant_capacity: 54_000.0,
            payload_capacity: None,
            isp: 420.0,
            unit_cost: None,
            ox_fuel_ratio: 5.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Coordinator,
    Commercial,
}

/// When a demand entry applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Day(u32),
    Keyword(TimeKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeKeyword {
    /// Every grid layer.
    All,
}

/// Negative amounts are demands, positive amounts supplies. Infinite
/// supplies model open markets such as propellant bought on Earth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandEntry {
    /// Owner; filled from the enclosing player on load.
    #[serde(default, skip_serializing)]
    pub player: String,
    pub commodity: String,
    pub node: String,
    pub time: TimeSpec,
    pub amount: f64,
    /// Repeat the entry every this many days until the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat_every: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub id: String,
    pub role: Role,
    #[serde(default = "default_fleet")]
    pub fleet_per_mission: u32,
    /// Fleet used when computing the baseline cost Q. Defaults to
    /// `fleet_per_mission`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_fleet: Option<u32>,
    #[serde(default)]
    pub isru_plant_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isru_node: Option<String>,
    #[serde(default)]
    pub own_demands: Vec<DemandEntry>,
}

fn default_fleet() -> u32 {
    2
}

impl Player {
    pub fn baseline_fleet(&self) -> u32 {
        self.baseline_fleet.unwrap_or(self.fleet_per_mission)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Currency per kg delivered to LEO.
    pub launch_cost: f64,
    pub spacecraft_unit_cost: f64,
    /// Currency per spacecraft per transport flight.
    pub flight_ops_cost: f64,
    pub h2_price: f64,
    pub o2_price: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { launch_cost: 3_500.0, spacecraft_unit_cost: 148e6, flight_ops_cost: 1e6, h2_price: 5.94, o2_price: 0.09 }
    }
}

/// Open departure intervals (inclusive days) for an arc, optionally limited
/// to one player. Arcs without any window entry are always open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionWindow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<String>,
    pub from: String,
    pub to: String,
    pub open: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat_every: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub step: u32,
    pub horizon: u32,
    #[serde(default)]
    pub mission_windows: Vec<MissionWindow>,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { step: 30, horizon: 720, mission_windows: Vec::new() }
    }
}

/// Where and when the shared infrastructure is released and due.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub commodity: String,
    pub release_node: String,
    pub due_node: String,
    pub release_days: Vec<u32>,
    pub due_days: Vec<u32>,
}

impl Default for Deployment {
    fn default() -> Self {
        Deployment {
            commodity: "infrastructure".into(),
            release_node: "Earth".into(),
            due_node: "Moon".into(),
            release_days: vec![0, 360],
            due_days: vec![360, 720],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub nodes: Vec<NetworkNode>,
    pub arcs: Vec<NetworkArc>,
    #[serde(default = "default_commodities")]
    pub commodities: Vec<Commodity>,
    #[serde(default = "default_spacecraft")]
    pub spacecraft: Vec<SpacecraftSpec>,
    pub players: Vec<Player>,
    #[serde(default)]
    pub cost_model: CostModel,
    #[serde(default)]
    pub time_grid: TimeGrid,
    /// Infrastructure mass D per mission window, kg.
    #[serde(default = "default_demand")]
    pub deployment_demand_total: f64,
    #[serde(default)]
    pub deployment: Deployment,
    /// kg water per year per kg of plant.
    #[serde(default = "default_productivity")]
    pub isru_productivity: f64,
    /// Spares consumed per year as a fraction of plant mass.
    #[serde(default = "default_maintenance")]
    pub maintenance_rate: f64,
    /// Years of spares delivered together with a pre-deployed plant.
    #[serde(default = "default_spares_years")]
    pub initial_spares_years: f64,
    /// Keep oxygen produced beyond the burn mixture ratio instead of venting it.
    #[serde(default)]
    pub retain_excess_o2: bool,
}

fn default_name() -> String {
    "scenario".into()
}
fn default_demand() -> f64 {
    30_000.0
}
fn default_productivity() -> f64 {
    5.0
}
fn default_maintenance() -> f64 {
    0.05
}
fn default_spares_years() -> f64 {
    1.0
}
fn default_spacecraft() -> Vec<SpacecraftSpec> {
    vec![SpacecraftSpec::default()]
}

pub fn default_commodities() -> Vec<Commodity> {
    use CommodityDomain::*;
    use CommodityRole::*;
    let c = |id: &str, domain, role| Commodity { id: id.into(), domain, role };
    vec![
        c("infrastructure", Continuous, Payload),
        c("h2", Continuous, Fuel),
        c("o2", Continuous, Oxidizer),
        c("water", Continuous, Water),
        c("isru-plant", Continuous, Plant),
        c("spares", Continuous, Spares),
        c("spacecraft", Discrete, Spacecraft),
    ]
}

impl ScenarioConfig {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn commodity_index(&self, id: &str) -> Option<usize> {
        self.commodities.iter().position(|c| c.id == id)
    }

    pub fn player_index(&self, id: &str) -> Option<usize> {
        self.players.iter().position(|p| p.id == id)
    }

    pub fn commodity_with_role(&self, role: CommodityRole) -> Option<usize> {
        self.commodities.iter().position(|c| c.role == role)
    }

    pub fn coordinator_index(&self) -> Option<usize> {
        self.players.iter().position(|p| p.role == Role::Coordinator)
    }

    pub fn coordinator(&self) -> &Player {
        &self.players[self.coordinator_index().expect("validated config has a coordinator")]
    }

    /// Indices of the commercial players, in declaration order.
    pub fn commercial_indices(&self) -> Vec<usize> {
        self.players.iter().enumerate().filter(|(_, p)| p.role == Role::Commercial).map(|(i, _)| i).collect()
    }

    pub fn num_commercial(&self) -> usize {
        self.commercial_indices().len()
    }

    /// Effective unit price of a spacecraft class.
    pub fn spacecraft_price(&self, v: usize) -> f64 {
        self.spacecraft[v].unit_cost.unwrap_or(self.cost_model.spacecraft_unit_cost)
    }
}
