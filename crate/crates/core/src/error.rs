use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    #[error("{0} is not a unit modulo {1}")]
    NonUnit(u64, u64),

    #[error("insufficient guard precision: residue known mod p^{have}, need mod p^{need}")]
    InsufficientPrecision { have: u32, need: u32 },

    #[error("p^{0} does not fit in a machine word")]
    ModulusOverflow(u32),

    #[error("degree bound exceeded: {0}")]
    Truncation(String),

    #[error("operand must lie in the S-subring (no T part)")]
    ExpectedSSubring,

    #[error("operands belong to different truncation boxes")]
    BoxMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("result unstable at the precision ceiling: {0}")]
    Unstable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
