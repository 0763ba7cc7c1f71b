//! Error type shared by every algorithm in the crate.

use thiserror::Error;

/// Errors raised by construction, reduction, identification and class field
/// routines.
///
/// Precision problems are reported through [`Error::PrecisionInsufficient`]
/// rather than silently truncating: every arithmetic routine tracks how many
/// uniformizer digits it can still trust and refuses to fabricate digits it
/// does not know.
#[derive(Debug, Error)]
pub enum Error {
    /// The characteristic supplied for a base field is not a prime number.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// A polynomial handed to a routine that requires an Eisenstein
    /// polynomial is not Eisenstein; `index` is the offending coefficient.
    #[error("polynomial is not Eisenstein (coefficient {index} violates the valuation condition)")]
    NotEisenstein { index: usize },

    /// An operation needed more digits than the operands carry.
    #[error("insufficient precision: the computation needs at least {needed} digits")]
    PrecisionInsufficient { needed: usize },

    /// A reduction step hit a branch point (an integer polygon break with a
    /// nontrivial residual kernel) and no branch choice was supplied.
    #[error("reduction step at level {level} requires a branch choice among {arity} alternatives")]
    ChoiceRequired { level: i64, arity: usize },

    /// The iterative factor refinement failed to converge within its step
    /// budget.  In exact arithmetic this indicates an internal bug or an
    /// input far outside the supported range, never a rounding problem.
    #[error("factor refinement exceeded its budget of {steps} steps")]
    LiftBudgetExceeded { steps: usize },

    /// The greedy filters could not separate two polynomials and the caller
    /// asked for a definite answer without enabling the exhaustive check.
    #[error("invariants do not separate the polynomials; an exhaustive root count is required")]
    IndistinguishablePolynomials,

    /// The exhaustive root search exceeded its node budget.
    #[error("root search exceeded its budget of {nodes} nodes")]
    SearchBudgetExceeded { nodes: usize },

    /// A norm group specification is internally inconsistent (e.g. its
    /// matrices do not annihilate values that every norm must annihilate, or
    /// the resulting linear system for the defining polynomial is singular).
    #[error("norm group data is inconsistent: {0}")]
    InconsistentNormDatum(String),

    /// A specification file or argument is malformed.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Two elements from different base fields were combined.
    #[error("elements belong to different base fields")]
    BaseMismatch,

    /// A unit was required (e.g. for inversion) but the element has
    /// positive valuation.
    #[error("element is not a unit")]
    NotAUnit,

    /// Textual input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check failed.  Seeing this is a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
