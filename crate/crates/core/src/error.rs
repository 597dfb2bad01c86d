use alloc::string::String;
use core::fmt;

/// Errors produced by chain construction, the closed forms and the solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Text did not parse as a rational or decimal literal.
    Parse(String),
    /// Division by an exact zero.
    DivisionByZero,
    /// A chain violated a structural invariant (lengths, ranges, boundary rates).
    InvalidChain(String),
    /// State indices out of order or out of range for the requested quantity.
    BadIndices(String),
    /// A constant-ratio fast path was called on a chain whose q(i)/p(i) varies.
    NonConstantRatio,
    /// A conditional game duration was requested from the barrier that
    /// contradicts the conditioning event (it does not exist there).
    UndefinedConditional(String),
    /// A simulated trajectory exceeded the defensive step cap.
    StepLimitExceeded,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::InvalidChain(msg) => write!(f, "invalid chain: {msg}"),
            Error::BadIndices(msg) => write!(f, "bad indices: {msg}"),
            Error::NonConstantRatio => write!(f, "ratio q(i)/p(i) is not constant"),
            Error::UndefinedConditional(msg) => write!(f, "undefined conditional time: {msg}"),
            Error::StepLimitExceeded => write!(f, "simulated trajectory exceeded the step cap"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
