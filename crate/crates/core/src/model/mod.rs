//! Scenario description: network, commodities, spacecraft, players, costs,
//! demands and the time grid, plus loading and validation.

mod config;
mod grid;
mod validate;

use std::path::Path;

pub use config::*;
pub use grid::*;
pub use validate::{validate_scenario, Diagnostic};

use crate::error::Error;

/// Parses a scenario from TOML text, fills defaults and validates it.
pub fn from_toml_str(text: &str) -> Result<ScenarioConfig, Error> {
    let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for p in &mut cfg.players {
        for d in &mut p.own_demands {
            d.player = p.id.clone();
        }
    }
    let diags = validate_scenario(&cfg);
    if diags.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Invalid(diags))
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_toml_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn to_toml_string(cfg: &ScenarioConfig) -> String {
    toml::to_string_pretty(cfg).expect("scenario config always serialises")
}

/// Bundled fixtures, usable without touching the file system.
pub mod fixtures {
    use super::*;

    pub const LUNAR_NOMINAL: &str = include_str!("../../fixtures/lunar_nominal.toml");
    pub const LUNAR_THREE_PLAYER: &str = include_str!("../../fixtures/lunar_three_player.toml");

    pub fn lunar_nominal() -> ScenarioConfig {
        from_toml_str(LUNAR_NOMINAL).expect("bundled fixture is valid")
    }

    pub fn lunar_three_player() -> ScenarioConfig {
        from_toml_str(LUNAR_THREE_PLAYER).expect("bundled fixture is valid")
    }
}
