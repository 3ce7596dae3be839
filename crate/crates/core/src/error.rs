use thiserror::Error;

use crate::index::MultiIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("index out of bounds on axis {axis}: needs {requested}, tensor holds up to {bound}")]
    OutOfBounds {
        axis: usize,
        requested: usize,
        bound: usize,
    },

    #[error("arity mismatch: expected {expected} axes, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("enumeration of 2^{bits} sign vertices exceeds the exact budget of 2^{limit}; use weak_bound_estimate")]
    BudgetExceeded { bits: usize, limit: usize },

    #[error("diagonal is inconsistent: mu{first} = {first_value} but mu{second} = {second_value}")]
    DiagonalInconsistent {
        first: MultiIndex,
        second: MultiIndex,
        first_value: String,
        second_value: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("schema violation in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("refused: {0}")]
    Refused(String),
}

impl MomentError {
    pub fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        MomentError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, MomentError>;
