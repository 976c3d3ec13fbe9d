use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DofError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("right-hand side is not in the column space")]
    Inconsistent,
    #[error("region is unbounded")]
    Unbounded,
    #[error("region is empty")]
    EmptyRegion,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("target lies outside the region (gauge {0})")]
    TargetOutsideRegion(String),
    #[error("target tuple is zero")]
    ZeroTarget,
    #[error("negative duration: {0}")]
    NegativeDuration(String),
    #[error("duration system is singular: {0}")]
    SingularSystem(String),
    #[error("corner point routes disagree: {0}")]
    InconsistentCorner(String),
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("relation violated: {0}")]
    RelationViolated(String),
    #[error("no generic channel realization after {0} resamples")]
    GenericityExhausted(usize),
    #[error("decode failure at receiver {receiver}: rank deficit {deficit}")]
    DecodeFailure { receiver: usize, deficit: usize },
    #[error("plan too large for literal simulation: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, DofError>;
