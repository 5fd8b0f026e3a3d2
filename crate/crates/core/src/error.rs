//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("resource limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a quadratic extension field")]
    WrongField,
    #[error("matrix is singular")]
    Singular,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("exact quotient is not an integer: {0}")]
    NonIntegral(String),
    #[error("family/parameter combination not supported: {0}")]
    IncompatibleFamily(String),
    #[error("vector is not isotropic")]
    NotIsotropic,
    #[error("zero vector")]
    ZeroVector,
    #[error("multipartition is not invariant under the star involution")]
    StarAsymmetric,
    #[error("d must be even for symplectic ratios")]
    BadParity,
    #[error("element is not a member of the group")]
    NotInGroup,
    #[error("embedded representative missing from larger group (form layout bug)")]
    EmbeddingNotInGroup,
    #[error("bounding object not valid at truncation {0}")]
    NotInBTn(usize),
    #[error("unknown class label: {0}")]
    UnknownLabel(String),
    #[error("parse error at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("duplicate interpolation abscissa")]
    DuplicateAbscissa,
    #[error("not enough interpolation points: {0}")]
    InsufficientPoints(String),
    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),
    #[error("cache version mismatch (got {got}, want {want})")]
    VersionMismatch { got: u32, want: u32 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
