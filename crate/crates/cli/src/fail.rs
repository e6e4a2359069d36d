use std::fmt::Display;
use std::path::Path;

use treegrowth::mtt::MttError;
use treegrowth::oracle::OracleError;
use treegrowth::query::QueryError;
use treegrowth::{AutomatonError, GrowthError, ParseError};

pub const USAGE: u8 = 64;
pub const DATA: u8 = 65;
pub const SOFTWARE: u8 = 70;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    pub fn at(path: &Path, code: u8, message: impl Display) -> Self {
        Failure::new(code, format!("{}: {message}", path.display()))
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::at(path, USAGE, e))
}

pub fn parse_error(path: &Path, e: ParseError) -> Failure {
    Failure::at(path, USAGE, e)
}

impl From<AutomatonError> for Failure {
    fn from(e: AutomatonError) -> Self {
        Failure::new(DATA, e)
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::new(DATA, e)
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Failure::new(DATA, e)
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        Failure::new(SOFTWARE, e)
    }
}

impl From<MttError> for Failure {
    fn from(e: MttError) -> Self {
        let code = match e {
            MttError::Parse(_)
            | MttError::Alphabet(_)
            | MttError::NoStates
            | MttError::RootRank(_)
            | MttError::DuplicateState(_)
            | MttError::MissingRule { .. }
            | MttError::InvalidRhs { .. } => USAGE,
            _ => DATA,
        };
        Failure::new(code, e)
    }
}
