//! Crate-wide error type.

use crate::analysis::RelationClass;
use crate::space::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An enumeration would touch more points than the configured budget
    /// allows. Never a silent truncation.
    #[error("point budget of {budget} points exceeded")]
    PointBudgetExceeded { budget: u64 },

    /// A point was passed to a space it does not belong to.
    #[error("point {point} does not belong to the space")]
    ForeignPoint { point: Point },

    /// An operation over a pair of maps or operators requires both to live on
    /// the same space.
    #[error("operands are defined on different spaces")]
    SpaceMismatch,

    /// A space descriptor violates a construction invariant.
    #[error("invalid space descriptor: {0}")]
    InvalidSpace(String),

    /// A self-map descriptor violates a construction invariant.
    #[error("invalid self-map descriptor: {0}")]
    InvalidMap(String),

    /// The operation needs two distinct maps.
    #[error("the two maps are equal")]
    EqualMaps,

    /// The operation needs an infinite deviation set.
    #[error("the deviation set of the pair is finite")]
    FiniteDeviation,

    /// The operation needs a map of infinite range.
    #[error("the map has finite range")]
    FiniteRange,

    /// A difference witness was requested at a point where the maps agree.
    #[error("the maps agree at {point}; no difference witness exists there")]
    NoDifferenceAt { point: Point },

    /// The operation is defined only for a specific relation class.
    #[error("operation requires relation class {expected}, found {found}")]
    WrongRelationClass {
        expected: RelationClass,
        found: RelationClass,
    },

    #[error("epsilon must be positive")]
    NonpositiveEpsilon,

    /// A step path was requested between operators in different essential
    /// components.
    #[error("operators lie in different essential components")]
    DifferentComponents,

    /// An exhaustive search would exceed its assignment cap.
    #[error("oracle budget exceeded: {0}")]
    OracleBudgetExceeded(String),

    /// Two routes that must agree did not. Always an implementation bug.
    #[error("internal consistency violation: {0}")]
    Internal(String),
}
