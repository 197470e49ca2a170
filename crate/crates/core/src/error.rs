use spacelog_milp::MilpError;
use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario:\n{}", .0.iter().map(|d| format!("  - {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("solver error: {0}")]
    Solver(#[from] MilpError),
    #[error("solver limit reached: {0}")]
    SolverLimit(String),
    #[error("no mutually beneficial design: {0}")]
    NoBeneficialDesign(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
