use thiserror::Error;

use crate::model::WorkerId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid sharing matrix: {0}")]
    InvalidMatrix(String),
    #[error("worker {worker} is out of range for {n} workers")]
    IndexOutOfRange { worker: WorkerId, n: usize },
    #[error("worker {0} is a member of the queried set")]
    MemberQuery(WorkerId),
    #[error("set of size {size} exceeds the enumeration limit {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error("value outside its domain: {0}")]
    DomainError(String),
    #[error("wage profile does not match the screening set")]
    ProfileMismatch,
    #[error("acceptance set is not a subset of the screening set")]
    SubsetViolation,
    #[error("operation requires a nonempty set")]
    EmptySet,
    #[error("prior {p} does not exceed the screening cutoff {p_star}")]
    BeliefTooLow { p: f64, p_star: f64 },
    #[error("sharing matrix is not a scalar-symmetric matrix")]
    AsymmetricMatrix,
    #[error("partition violation: {0}")]
    PartitionViolation(String),
    #[error("worker {0} was not rejected")]
    NotRejected(WorkerId),
    #[error("offer {0} is outside the litigable range")]
    OfferOutOfRange(f64),
    #[error("no non-protected screeners to compare against")]
    NoComparators,
    #[error("invalid discrimination configuration: {0}")]
    ConfigInvalid(String),
    #[error("indifference equation has no root in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("prior {0} is outside the intermediate-beliefs range")]
    BeliefsNotIntermediate(f64),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
}
