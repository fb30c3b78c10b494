//! Crate-wide error type.

/// Errors raised by selection calculus, ring arithmetic and morphism
/// classification.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Sizes of composed selections, tensor arities or operand lists disagree.
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    /// Two operands live over different deformation parameters.
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),

    /// A 1-based index fell outside its admissible range.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// The deformation parameter was rejected at validation.
    #[error("invalid deformation parameter q = {q}: {reason}")]
    InvalidQ { q: u64, reason: String },

    /// A value violates a structural invariant of its type.
    #[error("invalid value: {0}")]
    Invalid(String),

    /// A candidate morphism does not have the shape `t -> ±t_d + f·x_d`,
    /// `x -> g·x_d`.  Either the input is not a ring morphism or the
    /// deformation parameter is a square.
    #[error("not classifiable: {0}")]
    NotClassifiable(String),

    /// The element grammar could not be parsed.
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
