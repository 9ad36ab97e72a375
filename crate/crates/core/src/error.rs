use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("degree must be at least 1")]
    ZeroDegree,

    #[error("{what} of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u64 },

    #[error("degree {sub} does not divide degree {sup}")]
    NotDivisor { sub: u32, sup: u32 },

    #[error("mismatched operands: {0}")]
    Mismatch(String),

    #[error("cyclotomic conductors differ: {0} vs {1}")]
    ConductorMismatch(u32, u32),

    #[error("zero colour on arc ({0},{1})")]
    ZeroColour(usize, usize),

    #[error("colour domain does not match the arc set: {0}")]
    ColourDomain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("level {level} is out of range for a tower with {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("level {level} precedes the first nontrivial level {m0} of the label")]
    BelowFirstLevel { level: usize, m0: usize },

    #[error("not closed under products: {0}")]
    NotClosed(String),

    #[error("internal check failed: {0}")]
    Internal(String),
}
