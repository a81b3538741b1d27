use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A class whose monomials put nonzero net multiplicity on the zero weight.
    #[error("zero weight carries net multiplicity {0}; the Euler class is undefined")]
    ZeroForm(i64),

    /// A vertex class with torus-fixed terms.
    #[error("vertex has fixed terms: zero weight multiplicity {0}")]
    FixedTerm(i64),

    #[error("a denominator form vanishes at the sample point: {0}")]
    DegeneratePoint(String),

    #[error("series constant term must be {expected} for {op}")]
    NonUnitConstantTerm { op: &'static str, expected: u8 },

    #[error("negative exponent in MacMahon factor: {0}")]
    NegativeExponent(String),

    #[error("invalid solid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cache i/o: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
