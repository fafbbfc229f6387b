use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("value is rational: {0}")]
    RationalValue(String),

    #[error("invalid field label D = {0}: expected an integer > 1 that is not a perfect square")]
    InvalidRadicand(BigInt),

    #[error("elements live in different fields: Q(sqrt({left})) and Q(sqrt({right}))")]
    FieldMismatch { left: BigInt, right: BigInt },

    #[error("invalid continued fraction: {0}")]
    InvalidContinuedFraction(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid conductor f = {0}: expected f >= 1")]
    InvalidConductor(BigInt),

    #[error("pseudo-lattice generators are Z-linearly dependent")]
    LinearDependence,

    #[error("pseudo-lattice needs at least one generator")]
    EmptyGenerators,

    #[error("form ({a}, {b}, {c}) is not primitive")]
    ImprimitiveForm { a: i64, b: i64, c: i64 },

    #[error("discriminant {0} is not a positive non-square")]
    BadDiscriminant(i128),

    #[error("discriminant mismatch: {left} vs {right}")]
    DiscriminantMismatch { left: i64, right: i64 },

    #[error("discriminant {disc} exceeds the desk-scale bound {bound} (raise it with --max-disc or QDE_MAX_DISC)")]
    DiscriminantTooLarge { disc: BigInt, bound: u64 },

    #[error("desk-scale bound {0} is outside the supported range 1..=10^12")]
    InvalidBound(u64),

    #[error("invalid group structure: {0}")]
    InvalidGroup(String),

    #[error("tower inclusion {level} is not an injective homomorphism: {reason}")]
    NonInjectiveInclusion { level: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{}", IngestErrors(.0))]
    Ingest(Vec<RowError>),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// One rejected row of a curve dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line number for CSV input, 1-based record index for JSON input.
    pub line: usize,
    pub column: Option<String>,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.column {
            Some(col) => write!(f, "line {}, column {}: {}", self.line, col, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

struct IngestErrors<'a>(&'a [RowError]);

impl fmt::Display for IngestErrors<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} malformed row(s)", self.0.len())?;
        for e in self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}
