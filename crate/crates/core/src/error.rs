//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by lattice, measure, algebra, coding and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The generator matrix is singular, non-square or of odd real dimension.
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// Enumeration would exceed the configured dimension or node budget.
    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),

    /// A theta-type sum could not be certified to the requested tail tolerance.
    #[error("tail tolerance not achievable: {0}")]
    TailTolerance(String),

    /// A flatness precondition (ε ≤ 1/2 or ε < 1) fails; `epsilon` is the computed value.
    #[error("lattice not smooth enough: flatness factor {epsilon} exceeds {limit}")]
    NotSmoothEnough { epsilon: f64, limit: f64 },

    /// The requested rates cannot be realised by integer-scalar nesting.
    #[error(
        "nesting impossible for R = {requested}: nearest feasible R = {nearest} (scale {scale})"
    )]
    Nesting {
        requested: f64,
        nearest: f64,
        scale: u32,
    },

    /// An algebraic structure failed one of its load-time consistency checks.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// Matrix or vector shapes do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A numerical argument lies outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sampler's truncation mass could not be certified.
    #[error("sampler certification failed: {0}")]
    Certification(String),

    /// Unknown catalog entry.
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
