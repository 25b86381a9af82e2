use thiserror::Error;

/// Errors produced by the simulation, metrics, and analytics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// No meeting is possible because one gender has no living agents.
    #[error("population extinct: {0} pool is empty")]
    EmptyGenderPool(&'static str),

    #[error("duplicate user_id `{0}`")]
    DuplicateUserId(String),

    #[error("unknown user_id `{0}` referenced by mating edge")]
    UnknownUserId(String),

    #[error("mating edge ({0}, {1}) joins two users of the same gender")]
    SameGenderEdge(String, String),

    #[error("mating edge ({0}, {0}) is a self-edge")]
    SelfEdge(String),

    #[error("unknown gender code `{code}` at line {line} (expected F or M)")]
    UnknownGenderCode { code: String, line: u64 },

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("unknown property `{name}` (known: {known})")]
    UnknownProperty { name: String, known: String },

    #[error("bin width mismatch: {left} vs {right}")]
    BinWidthMismatch { left: f64, right: f64 },

    #[error("histogram file invalid: {0}")]
    InvalidHistogram(String),

    #[error("duplicate seed {0} in ensemble seed list")]
    DuplicateSeed(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
