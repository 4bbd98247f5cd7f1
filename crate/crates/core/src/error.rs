use thiserror::Error;

use crate::exact::Degenerate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown family identifier `{0}`")]
    UnknownFamily(String),

    #[error("family parameter must be nonnegative in `{0}`")]
    NegativeParameter(String),

    #[error("{family}: {what} is not available; {hint}")]
    Capability {
        family: String,
        what: &'static str,
        hint: &'static str,
    },

    #[error("{family}: exponent {which} at {args} is not an integer")]
    NonIntegralExponent {
        family: String,
        which: char,
        args: String,
    },

    #[error("{family}: {what} is not integral at {at}")]
    NonIntegral {
        family: String,
        what: &'static str,
        at: String,
    },

    #[error("{family}: exact division failed for {what} at {at}")]
    InexactDivision {
        family: String,
        what: &'static str,
        at: String,
    },

    #[error("{context}: {source}")]
    Solve { context: String, source: Degenerate },

    #[error("{0}")]
    Falsified(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl std::error::Error for Degenerate {}
