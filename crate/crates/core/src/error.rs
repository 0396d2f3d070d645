use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("identity {id} is not defined at n = {n}")]
    IndexOutOfRange { id: String, n: i64 },

    #[error("expected an irrational stand-in (nonzero infinitesimal part), got {0}")]
    RationalInput(String),

    #[error("expected a positive value, got {0}")]
    NonPositive(String),

    #[error("partition {parts:?} is not ordered by floor(a*theta)/a")]
    PartitionOrder { parts: Vec<u64> },

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("input {0:?} is not sorted ascending")]
    Unsorted(Vec<u64>),

    #[error("{value} is an integer, so floor and ceiling disagree")]
    IntegralQuotient { value: String },

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("weight vector is zero")]
    ZeroVector,

    #[error("Cremona move needs three distinct indices, got ({0}, {1}, {2})")]
    IndexCollision(usize, usize, usize),

    #[error("reduction did not terminate within {0} moves")]
    MoveBudget(usize),

    #[error("inconsistent curve data: {0}")]
    Inconsistent(String),
}
