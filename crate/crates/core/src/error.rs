use thiserror::Error;

use crate::calculus::DerivativeReport;
use crate::verdict::Verdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("sequence value is zero at index {index}")]
    PointwiseZero { index: u64 },
    #[error("sequence undefined at index {index}: {reason}")]
    PointUndefined { index: u64, reason: String },
    #[error("no standard part (verdict {0})")]
    NoStandardPart(Verdict),
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("domain error in `{node}`")]
    Domain { node: String },
    #[error("non-smooth node `{0}` has no symbolic derivative")]
    NonSmoothNode(String),
    #[error("expression uses the variable x but no argument was given")]
    FreeVariable,
    #[error("`{0}` is not a real constant")]
    NotReal(String),
    #[error("truncation order too small to decide: {0}")]
    PrecisionExhausted(String),
    #[error("unsupported set descriptor: {0}")]
    UnsupportedSet(String),
    #[error("{x} is not an interior point of the domain")]
    NotInterior { x: f64 },
    #[error("not derivable at {x}: probe quotients disagree or have no standard part")]
    NotDerivable { x: f64, report: Box<DerivativeReport> },
    #[error("premise not met (verdict {0})")]
    PremiseNotMet(Verdict),
    #[error("degenerate interval: endpoints coincide")]
    DegenerateInterval,
    #[error("function is not strictly positive (value {value} at {at})")]
    NotPositive { at: f64, value: f64 },
    #[error("unknown property suite `{0}`")]
    UnknownSuite(String),
    #[error("relation {rel} expects {expected} arguments, got {got}")]
    Arity { rel: String, expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
