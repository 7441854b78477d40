use alloc::string::String;
use core::fmt;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum PmlError {
    /// Malformed input: empty sample, bad grid bounds, shape mismatch and so on.
    Invalid(String),
    /// The relaxation has no feasible point for this profile and grid.
    Infeasible(String),
    /// A matrix entry or objective value was NaN or infinite.
    NonFinite(&'static str),
    /// An exact oracle was asked for an instance above its size limit.
    TooLarge(String),
    /// Spanning-tree packing failed; carries the smallest cut seen.
    Packing { cut_weight: u64, side: alloc::vec::Vec<usize> },
    /// No orientation with the requested residues was found.
    OrientationExhausted,
    /// Invariant violated inside a pipeline stage (a bug, not bad input).
    Internal(String),
}

pub type Result<T> = core::result::Result<T, PmlError>;

impl fmt::Display for PmlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmlError::Invalid(m) => write!(f, "invalid input: {m}"),
            PmlError::Infeasible(m) => write!(f, "infeasible: {m}"),
            PmlError::NonFinite(w) => write!(f, "non-finite value in {w}"),
            PmlError::TooLarge(m) => write!(f, "instance too large: {m}"),
            PmlError::Packing { cut_weight, side } => write!(
                f,
                "spanning tree packing failed; cut of weight {cut_weight} around {} vertices",
                side.len()
            ),
            PmlError::OrientationExhausted => write!(f, "orientation search exhausted"),
            PmlError::Internal(m) => write!(f, "internal invariant violated: {m}"),
        }
    }
}

impl core::error::Error for PmlError {}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(PmlError::Invalid(msg.into()))
}
