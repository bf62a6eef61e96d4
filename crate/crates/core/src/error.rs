use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or categorical parameter is outside its domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The graph cannot carry the requested asset structure.
    #[error("structure error: {0}")]
    Structure(String),

    /// A balance sheet has non-positive effective external asset.
    #[error("validation error: node {node} has effective external asset {value} <= 0")]
    Validation { node: usize, value: f64 },

    /// Two result sets could not be matched cell by cell.
    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Structure(_) | Error::Pairing(_) | Error::Parse { .. } => 2,
            Error::Validation { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}
