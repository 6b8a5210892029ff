//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// A (j, m) label pair is malformed: negative spin, |m| > j, or the
    /// doubled values disagree in parity.
    #[error("invalid spin labels: {0}")]
    InvalidLabels(String),

    /// A spin label exceeds the factorial table used by the coupling kernel.
    #[error("spin label too large: two_j = {0}")]
    LabelTooLarge(i32),

    /// Two states (or a state and a POVM) are not defined on the same
    /// list of irreducible blocks.
    #[error("state ladders do not match")]
    LadderMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Root refinement or inverse iteration exceeded its iteration cap.
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    /// The POVM leaks probability mass; simulation aborts rather than
    /// renormalizing silently.
    #[error("POVM incomplete: probability mass deficit {deficit:.3e}")]
    IncompletePovm { deficit: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
