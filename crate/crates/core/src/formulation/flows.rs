use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::ScenarioConfig;

use super::Formulation;

/// One nonzero flow of a solution, with readable ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub player: String,
    pub vehicle: String,
    pub from: String,
    pub to: String,
    /// Departure day.
    pub t: u32,
    pub commodity: String,
    pub amount: f64,
}

/// Nonzero flows in variable order.
pub fn flow_records(cfg: &ScenarioConfig, form: &Formulation, values: &[f64]) -> Vec<FlowRecord> {
    form.flows
        .iter()
        .filter(|(_, v)| values[v.0].abs() > 1e-9)
        .map(|(k, v)| FlowRecord {
            player: cfg.players[k.player].id.clone(),
            vehicle: cfg.spacecraft[k.vehicle].id.clone(),
            from: cfg.nodes[k.from].id.clone(),
            to: cfg.nodes[k.to].id.clone(),
            t: k.day,
            commodity: cfg.commodities[k.commodity].id.clone(),
            amount: values[v.0],
        })
        .collect()
}

pub fn write_flows_csv<W: Write>(out: W, records: &[FlowRecord]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_flows_file(path: impl AsRef<Path>, records: &[FlowRecord]) -> Result<(), Error> {
    let f = std::fs::File::create(path)?;
    write_flows_csv(f, records)
}
