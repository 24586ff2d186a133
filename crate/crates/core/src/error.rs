use thiserror::Error;

/// Every failure the library reports.
///
/// The CLI maps `Precision` to exit code 3 and everything except `Parse`
/// to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("zero input: the map is undefined at 0")]
    ZeroInput,
    #[error("precision exhausted: predicate undecided at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("divergent tail: zero denominator after {terms} terms")]
    DivergentTail { terms: usize },
    #[error("digit {site} is {digit}, not +1 (cannot singularise)")]
    NotSingularisable { site: usize, digit: String },
    #[error("cannot insert at digit {site}: {reason}")]
    NotInsertable { site: usize, reason: String },
    #[error("rewrite not applicable: {0}")]
    NotApplicable(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("unsupported alpha: {0}")]
    UnsupportedAlpha(String),
    #[error("unsupported prefix: {0}")]
    UnsupportedPrefix(String),
    #[error("no attracting real fixed point")]
    NoRealFixedPoint,
    #[error("invalid past: {0}")]
    InvalidPast(String),
    #[error("values live in different quadratic fields Q(sqrt {left}) and Q(sqrt {right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
