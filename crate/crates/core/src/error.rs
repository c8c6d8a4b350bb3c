use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site index {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("duplicate site {0} in gate support")]
    DuplicateSite(usize),
    #[error("gate arity {arity} does not match {sites} supplied sites")]
    ArityMismatch { arity: usize, sites: usize },
    #[error("operator acts on {got} qubits, state has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid stabilizer generators: {0}")]
    InvalidGenerators(String),
    #[error("state of {amplitudes} amplitudes exceeds the dense oracle limit of {limit}")]
    OracleTooLarge { amplitudes: u128, limit: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fit window too short: {0}")]
    InsufficientRange(String),
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),
    #[error("dimension D = {dim} is singular for Q = {q} (need D >= Q)")]
    SingularDimension { dim: u64, q: usize },
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("partitions of different size: {0} vs {1}")]
    PartitionSizeMismatch(usize, usize),
    #[error("no crossing found: {0}")]
    NoCrossing(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
