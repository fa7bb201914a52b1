use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("explicit representation needs n <= {cap}, got n = {n}")]
    ExplicitCap { n: usize, cap: usize },
    #[error("operation requires an explicit set: {0}")]
    OracleNotSupported(&'static str),
    #[error("set is empty")]
    EmptySet,
    #[error("set is not monotone")]
    NotMonotone,
    #[error("weight table is not normalized (total mass {total})")]
    Unnormalized { total: f64 },
    #[error("weight table has a negative or non-finite entry at state {index}")]
    InvalidWeight { index: usize },
    #[error("Curie-Weiss dimension must be even and >= 2, got {0}")]
    OddDimension(usize),
    #[error("brute-force enumeration supports n <= {cap}, got n = {n}")]
    BruteForceCap { n: usize, cap: usize },
    #[error("state {0} is not a member of the set")]
    StateNotInSet(String),
    #[error("rejection sampler exhausted {tries} tries")]
    RejectionExhausted { tries: u64 },
    #[error("set of size {size} exceeds the {what} cap of {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("mixing time exceeds the cap of {cap} steps")]
    MixingCapExceeded { cap: usize },
    #[error("invalid set spec `{spec}`: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error("invalid state string `{0}`")]
    InvalidState(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
