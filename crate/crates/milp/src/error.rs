use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("constraint or objective `{context}` references undeclared variable #{id}")]
    UndeclaredVariable { id: usize, context: String },
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("backend failure: {0}")]
    Backend(String),
}
