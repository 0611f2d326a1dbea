//! Error type shared by every module of the engine.
//!
//! The precision model is fail-loud: an operation that cannot certify its
//! answer from the stored data returns an error instead of guessing.

use alloc::string::String;
use core::fmt;

use crate::rational::Rational;

/// Errors raised by group, series, logarithm, rank, and tower operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two elements built over different label universes were combined.
    MismatchedUniverse,
    /// Two stage elements of different tower stages were combined.
    MismatchedStage,
    /// The operation rejects the zero element (e.g. the archimedean class of 0).
    ZeroArgument,
    /// The stored part is zero but the error floor is finite, so the
    /// valuation of the true value is unknown.
    IndeterminateValuation,
    /// The stored terms and floors cannot decide the requested comparison
    /// or decomposition.
    PrecisionInsufficient,
    /// The operation requires a strictly positive (or positive infinite) input.
    NonPositive,
    /// The operation requires a strictly negative input.
    NonNegative,
    /// A middle-logarithm domain violation: the residue is a rational other
    /// than the one the active mode can log or exp exactly.
    NonMonicResidue(Rational),
    /// The input is not a 1-unit (leading term must be exactly 1 at exponent 0).
    NotAOneUnit,
    /// The purely infinite part is not in the image of the cross-section;
    /// carries a printout of the offending exponent.
    NotInImage(String),
    /// An interval-valued constant reached an order-sensitive operation.
    InexactConstant,
    /// Iterated logarithms never brought the infinite part down to the
    /// ground stage within the permitted number of steps.
    NoDescent,
    /// Tower depth request above the configured cap.
    DepthExceeded { requested: usize, cap: usize },
    /// An element addressed a stage the tower does not contain.
    StageOutOfRange { stage: usize, depth: usize },
    /// Invalid label list for an order type (empty, duplicate, bad charset).
    InvalidOrderType(String),
    /// A label that is not part of the universe.
    UnknownLabel(String),
    /// An index offset outside the supported range.
    OffsetOutOfRange(i64),
    /// A structurally invalid element or segment was requested.
    InvalidConstruction(String),
    /// Invalid precision policy (Taylor order must be at least 1).
    InvalidPolicy(String),
    /// A probed logarithm violated a compatibility law; carries the witness.
    IncompatibleLog(String),
    /// Two independently computed verdicts that must agree did not.
    RouteDisagreement(String),
    /// Text input rejected at byte position `pos`.
    Parse { pos: usize, msg: String },
}

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MismatchedUniverse => write!(f, "elements belong to different label universes"),
            Error::MismatchedStage => write!(f, "stage elements belong to different tower stages"),
            Error::ZeroArgument => write!(f, "operation is undefined on the zero element"),
            Error::IndeterminateValuation => {
                write!(f, "valuation indeterminate: stored part is zero below a finite floor")
            }
            Error::PrecisionInsufficient => {
                write!(f, "precision insufficient: floors hide the deciding term")
            }
            Error::NonPositive => write!(f, "operation requires a strictly positive input"),
            Error::NonNegative => write!(f, "operation requires a strictly negative input"),
            Error::NonMonicResidue(r) => {
                write!(f, "residue {r} is outside the exactly-loggable constants of this mode")
            }
            Error::NotAOneUnit => write!(f, "input is not a 1-unit"),
            Error::NotInImage(w) => {
                write!(f, "purely infinite part is outside the cross-section image: {w}")
            }
            Error::InexactConstant => {
                write!(f, "interval-valued constant cannot feed an order-sensitive operation")
            }
            Error::NoDescent => {
                write!(f, "iterated logarithms do not reach the ground stage within the bound")
            }
            Error::DepthExceeded { requested, cap } => {
                write!(f, "tower depth {requested} exceeds cap {cap}")
            }
            Error::StageOutOfRange { stage, depth } => {
                write!(f, "stage {stage} outside tower of depth {depth}")
            }
            Error::InvalidOrderType(m) => write!(f, "invalid order type: {m}"),
            Error::UnknownLabel(l) => write!(f, "unknown label: {l}"),
            Error::OffsetOutOfRange(n) => write!(f, "offset {n} outside the supported range"),
            Error::InvalidConstruction(m) => write!(f, "invalid construction: {m}"),
            Error::InvalidPolicy(m) => write!(f, "invalid policy: {m}"),
            Error::IncompatibleLog(w) => write!(f, "log map violates compatibility: {w}"),
            Error::RouteDisagreement(w) => {
                write!(f, "internal consistency failure, independent routes disagree: {w}")
            }
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
