use thiserror::Error;

use crate::kg::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A line of an input file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A token outside the identifier alphabet, or an empty one.
    #[error("invalid identifier {0:?}: expected ASCII letters, digits, '_' or ':'")]
    InvalidIdentifier(String),

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("saturation exceeded the budget of {cap} triples")]
    FixpointBudgetExceeded { cap: usize },

    #[error("graph is not saturated under the given rules")]
    NotSaturated,

    #[error("{candidates} removable triples exceed the antecedent cap of {cap}")]
    AntecedentBudgetExceeded { candidates: usize, cap: usize },

    /// The database is outside the valid space (schema constraints fail).
    #[error("database violates the schema: {}", summarize(.0))]
    InvalidDatabase(Vec<Violation>),

    #[error("epsilon must be a positive finite number, got {0}")]
    InvalidEpsilon(f64),

    #[error("degenerate game: {0}")]
    DegenerateGame(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    let mut parts: Vec<String> = violations.iter().take(3).map(|v| v.to_string()).collect();
    if violations.len() > 3 {
        parts.push(format!("and {} more", violations.len() - 3));
    }
    parts.join("; ")
}
