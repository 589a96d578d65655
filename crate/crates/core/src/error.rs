use thiserror::Error;

/// Errors raised by the constant, solver, and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {what} = {value} (need >= {min})")]
    InvalidDimension { what: &'static str, value: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("maximum number of steps exceeded at t = {t}")]
    MaxStepsExceeded { t: f64 },

    #[error("shot reached t = {t} unclassified (h = {h:e}, h' = {dh:e})")]
    Unclassified { t: f64, h: f64, dh: f64 },

    #[error("no zero-crossing shot found up to alpha = {alpha}")]
    BracketNotFound { alpha: f64 },

    #[error("bisection invariant violated at alpha = {alpha}: {detail}")]
    BracketInvariant { alpha: f64, detail: String },

    #[error("profile is empty or degenerate: {0}")]
    DegenerateProfile(String),

    #[error("profile dimension mismatch: profile has n = {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("u_max = {u_max} outside the closed-orbit window ({lo}, {hi})")]
    OrbitWindow { u_max: f64, lo: f64, hi: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
