use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdeError {
    #[error("invalid rank {rank} for type {kind}")]
    InvalidRank { kind: char, rank: usize },
    #[error("unsupported field {0}")]
    UnsupportedField(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("the zero point has no orbit representative")]
    ZeroPoint,
    #[error("discriminant vanishes")]
    ZeroDiscriminant,
    #[error("factorisation budget exceeded: cofactor {0} is composite")]
    FactorBudgetExceeded(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("exponent identity fails for {kind} at coordinate {coordinate}: {detail}")]
    IdentityFailure { kind: String, coordinate: usize, detail: String },
    #[error("no shift exists: {0}")]
    NoShift(String),
    #[error("matrix is not in W0 shape: {0}")]
    ShapeError(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for AdeError {
    fn from(e: std::io::Error) -> Self {
        AdeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, AdeError>;
