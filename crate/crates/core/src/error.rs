//! Crate-wide error type.

use crate::problem::ConeKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Expression text does not conform to the grammar. `pos` is a byte
    /// offset into the input.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A variable index outside `1..=n` was used.
    #[error("variable x{index} out of range for dimension {n}")]
    VarOutOfRange { index: usize, n: usize },

    /// Evaluation left the domain of a unary function or divided by zero.
    #[error("domain violation: {0}")]
    Domain(String),

    /// The queried point is not feasible within the activity tolerance.
    /// `constraint` is 1-based.
    #[error("point is not feasible within tolerance {tol:e}: constraint {constraint} violated")]
    Infeasible { constraint: usize, tol: f64 },

    /// Active-component gradients are linearly dependent; multipliers would
    /// not be unique, so the solve is refused.
    #[error("constraint qualification fails: active gradients have rank {rank} < {active}")]
    LicqFailure { rank: usize, active: usize },

    /// The operation is defined only for a subset of the cones.
    #[error("{op} is not supported for {cone:?} constraints")]
    UnsupportedCone { op: &'static str, cone: ConeKind },

    /// The operation is defined only for specific dimensions.
    #[error("{op} requires dimension 2, got {n}")]
    UnsupportedDimension { op: &'static str, n: usize },

    /// Active-set enumeration would exceed the combination cap.
    #[error("active-set enumeration needs {needed} subsets, cap is {cap}")]
    ActiveSetCap { needed: usize, cap: usize },

    /// Malformed input: bad dimensions, empty constraint list, invalid
    /// parameter ranges, or an unreadable problem file.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
