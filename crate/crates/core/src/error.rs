use crate::assignment::FeasibilityViolation;
use crate::instance::InstanceViolation;
use std::fmt;
use thiserror::Error;

/// A rejected input file, with the line when one is known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub file: String,
    pub line: Option<u64>,
    pub message: String,
}

impl ParseError {
    pub fn new(file: impl Into<String>, line: Option<u64>, message: impl Into<String>) -> Self {
        ParseError {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.file, line, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("alpha {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("alpha {0} has more than 4 decimal places")]
    AlphaPrecision(f64),

    #[error("instance is invalid: {}", join(.0))]
    InvalidInstance(Vec<InstanceViolation>),

    #[error("assignment is infeasible: {}", join(.0))]
    InfeasibleAssignment(Vec<FeasibilityViolation>),

    #[error("model is infeasible: {0}")]
    Infeasible(String),

    #[error("no feasible assignment found within limits (best bound {best_bound})")]
    NoSolution { best_bound: f64 },

    #[error("greedy construction reached a dead end placing discipline '{0}'")]
    GreedyDeadEnd(String),

    #[error("instance too large for oracle: about {estimate:.3e} leaves exceeds the limit of {limit}")]
    OracleTooLarge { estimate: f64, limit: u64 },

    #[error("ids not present in the instance: {}", .0.join(", "))]
    UnknownIds(Vec<String>),

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
