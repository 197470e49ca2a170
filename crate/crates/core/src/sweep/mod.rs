//! Batch evaluation over design and parameter grids, with CSV and JSON
//! outputs for plotting.

mod run;
mod spec;
mod studies;

pub use run::*;
pub use spec::*;
pub use studies::*;
