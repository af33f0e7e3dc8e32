use alloc::string::String;
use core::fmt;

/// Errors reported by curve validation, projection and spectrum estimation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input curve fails validation (self-intersection, repeated vertex, ...).
    InvalidCurve(String),
    /// An operation parameter is out of range or inconsistent.
    InvalidParameter(String),
    /// The shadow for this direction violates general position.
    DegenerateProjection(String),
    /// Crossing count above the state-sum cap, even after simplification.
    TooManyCrossings { crossings: usize, cap: usize },
    /// Malformed diagram code or curve data.
    Parse(String),
    /// Direction resampling kept hitting degenerate projections.
    DegeneracyExhausted { failed: usize, attempts: u32 },
    /// More than one knot-type class observed in a single spectrum.
    KnotTypeConflict(String),
    /// A structural self-check failed; indicates a bug, not bad input.
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCurve(m) => write!(f, "invalid curve: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::DegenerateProjection(m) => write!(f, "degenerate projection: {m}"),
            Error::TooManyCrossings { crossings, cap } => {
                write!(f, "diagram has {crossings} crossings, above the cap of {cap}")
            }
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::DegeneracyExhausted { failed, attempts } => write!(
                f,
                "{failed} direction(s) still degenerate after {attempts} resampling attempts"
            ),
            Error::KnotTypeConflict(m) => write!(f, "knot-type uniqueness violated: {m}"),
            Error::Internal(m) => write!(f, "internal check failed: {m}"),
        }
    }
}
