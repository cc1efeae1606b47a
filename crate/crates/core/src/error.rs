use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid base {0}: the base must be at least 2")]
    InvalidBase(u32),

    #[error("unsupported block {0:?}: all-zero blocks occur infinitely often in the padded expansion")]
    UnsupportedBlock(String),

    #[error("invalid digit block {0:?}")]
    InvalidBlock(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence has no value at index {0}")]
    MissingSequenceIndex(u32),

    #[error("function is not quasimultiplicative: {0}")]
    NotQuasimultiplicative(String),

    #[error("cannot compose functions: {0}")]
    Composition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("minimization lost zero-insensitivity")]
    MinimizationConflict,

    #[error("representation is not canonical: {0}")]
    NotCanonical(String),

    #[error("representation is not zero-insensitive (M_0 v != v)")]
    NotZeroInsensitive,

    #[error("malformed representation: {0}")]
    MalformedRepresentation(String),

    #[error("transducer is not connected: state {0} is unreachable from the initial state")]
    Disconnected(usize),

    #[error("malformed transducer: {0}")]
    MalformedTransducer(String),

    #[error("resolvent (I - T/q) is singular: the series does not converge at x = 1/q")]
    SpectralRadius,

    #[error("root finding did not converge: {0}")]
    Convergence(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("unknown function {0:?}")]
    UnknownFunction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
