use thiserror::Error;

/// Errors raised by the expansion, solving and reporting layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("polynomials live in different variable registries")]
    RegistryMismatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` may not be registered")]
    ForbiddenVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("constant term is not a unit: {0}")]
    NonUnitConstant(String),

    #[error("inner series must have zero constant term")]
    NonzeroConstantTerm,

    #[error("series is not normalized as f(0) = 0, f'(0) = 1")]
    BadNormalization,

    #[error("formal variable mismatch: {0}")]
    FormalVariableMismatch(String),

    #[error("inexact division at degree {degree}")]
    InexactDivision { degree: u32 },

    #[error("coefficient {0} is not divisible in the coefficient domain")]
    NonIntegral(String),

    #[error("rewrite limit of {0} steps exceeded")]
    RewriteLimit(usize),

    #[error("order {requested} exceeds available order {available}")]
    OrderTooSmall { requested: u32, available: u32 },

    #[error("underdetermined system at weight {weight}: unknowns {unknowns:?}")]
    Underdetermined { weight: u32, unknowns: Vec<String> },

    #[error("no specialization at weight {weight}: leftover constraint {residual}")]
    Inconsistent { weight: u32, residual: String },

    #[error("resource guard tripped: {0}")]
    Guard(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
