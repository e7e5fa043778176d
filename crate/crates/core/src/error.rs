use std::fmt;

use thiserror::Error;

use crate::pwdb::ComponentCheck;

/// A formula syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at offset {}: expected one of [{}], found {}",
            self.position,
            self.expected.join(", "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("formula parse error {0}")]
    Parse(#[from] ParseError),

    #[error("variable `{0}` is not bound by the assignment")]
    UnboundVariable(String),

    #[error("expansion over {vars} variables exceeds the cap of {cap}")]
    ExpansionTooLarge { vars: usize, cap: usize },

    #[error("no pair of possible worlds is compatible; the integration is empty")]
    EmptyIntegration,

    #[error("probabilistic constraints violated in {} component(s)", violating(.0))]
    ProbConstraintViolation(Vec<ComponentCheck>),

    #[error("not recognized as integrated: {0}")]
    NotIntegrated(String),

    #[error("no truth assignment satisfies the event constraints")]
    NoValidAssignment,

    #[error("no probability given for event variable `{0}`")]
    MissingProbability(String),

    #[error("invalid probability `{0}`")]
    InvalidProbability(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed document: {0}")]
    Document(String),
}

fn violating(checks: &[ComponentCheck]) -> usize {
    checks.iter().filter(|c| c.violation.is_some()).count()
}

pub type Result<T> = std::result::Result<T, Error>;
