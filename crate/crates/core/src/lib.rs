//! Incentive design for commercial participation in space infrastructure
//! deployment: a time-expanded network-flow MILP for mission costs, the
//! Nash-bargaining game layer on top of it, and batch sweeps over designs.

pub mod cli;
pub mod error;
pub mod formulation;
pub mod game;
pub mod model;
mod par;
pub mod physics;
pub mod sweep;

pub use error::Error;
pub use par::default_workers;
