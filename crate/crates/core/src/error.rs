use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NucaError {
    #[error("modulus {0} is not prime")]
    NonPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("table rule too large: {size} entries exceeds cap {cap}")]
    TableTooLarge { size: u128, cap: u128 },
    #[error("table rule is not zero-quiescent at cell {0}")]
    NotQuiescent(String),
    #[error("memory cap exceeded: {size} offsets (cap {cap})")]
    MemoryCap { size: usize, cap: usize },
    #[error("placement unresolved at cell {0}: cluster positions are only promised")]
    PlacementUnresolved(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("reduction precondition violated: {0}")]
    ReductionPrecondition(String),
    #[error("radius exhausted: no inverse found up to radius {0}")]
    RadiusExhausted(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sparse clusters overlap: {0}")]
    Disjointness(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl NucaError {
    /// Resource-limit style failures (caps) as opposed to malformed input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            NucaError::TableTooLarge { .. }
                | NucaError::MemoryCap { .. }
                | NucaError::ResourceLimit(_)
                | NucaError::RadiusExhausted(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, NucaError>;
