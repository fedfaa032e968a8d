use std::fmt;

use num_bigint::BigInt;

/// Errors surfaced by every operation in this crate.
///
/// `BudgetExceeded` is kept separate from the other variants because the CLI
/// maps it to a dedicated exit code: every enumeration here is exponential in
/// the arity, and a refusal must name the blown budget instead of hanging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed user input (coefficient lists, sequence specs, flags).
    Parse(String),
    /// A coefficient was zero; no Sidon set with two elements exists then.
    ZeroCoefficient { position: usize },
    /// Arity too large for an exhaustive check.
    ArityTooLarge { arity: usize, ceiling: usize },
    /// An enumeration would exceed its value budget.
    BudgetExceeded { required: u128, budget: u128, what: &'static str },
    /// The candidate element is already in the set.
    ElementInSet(BigInt),
    /// The linear form lacks property N, which the operation requires.
    PropertyNRequired,
    /// A caller-guaranteed Sidon precondition was found violated.
    NotSidon(String),
    /// A finite sequence was asked for a term past its end.
    SequenceExhausted { len: usize, requested: usize },
    /// The bounded-mode growth hypothesis failed on the given prefix.
    GrowthCheckFailed { index: u64, lhs: BigInt, rhs: BigInt },
    /// Parameter outside its documented range.
    InvalidParameter(String),
    /// I/O failure, carrying the rendered cause.
    Io(String),
    /// A state the underlying guarantees rule out; indicates a bug here.
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::ZeroCoefficient { position } => write!(
                f,
                "coefficient at position {position} is zero; distinct tuples collide \
                 trivially, so no Sidon set with two or more elements exists for this form"
            ),
            Error::ArityTooLarge { arity, ceiling } => write!(
                f,
                "arity {arity} too large for exhaustive check (ceiling {ceiling}); \
                 raise the ceiling explicitly to proceed"
            ),
            Error::BudgetExceeded { required, budget, what } => write!(
                f,
                "{what} needs {required} values, over the budget of {budget}; \
                 raise the budget explicitly to proceed"
            ),
            Error::ElementInSet(b) => write!(f, "candidate {b} is already in the set"),
            Error::PropertyNRequired => {
                write!(f, "the linear form lacks property N; operation undefined")
            }
            Error::NotSidon(msg) => write!(f, "precondition breach: set is not Sidon ({msg})"),
            Error::SequenceExhausted { len, requested } => write!(
                f,
                "sequence has {len} terms but term {requested} was requested"
            ),
            Error::GrowthCheckFailed { index, lhs, rhs } => write!(
                f,
                "growth check failed at k={index}: {lhs} <= {rhs}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
            Error::Internal(msg) => write!(f, "internal error (please report): {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
