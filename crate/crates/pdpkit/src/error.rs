//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by profile construction, parsing, and analysis.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("empty input: no multipath records")]
    EmptyInput,
    #[error("invalid bin width: {0} ns (must be positive and finite)")]
    InvalidBinWidth(f64),
    #[error("invalid threshold: {0} dB (must be negative and finite)")]
    InvalidThreshold(f64),
    #[error("profile not normalized: operation requires the peak-relative frame")]
    NotNormalized,
    #[error("invalid delay spread: {0} ns (must be positive and finite)")]
    InvalidDelaySpread(f64),
    #[error("empty profile")]
    EmptyProfile,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid TOA: {0} s (must be finite and non-negative)")]
    InvalidToa(f64),
    #[error("invalid power: {0} (must be finite)")]
    InvalidPower(f64),
    #[error("invalid phase: {0} (must be finite)")]
    InvalidPhase(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too small: delay {delay_ns} ns outside [{start_ns}, {end_ns}] ns")]
    GridTooSmall {
        delay_ns: f64,
        start_ns: f64,
        end_ns: f64,
    },
    #[error("degenerate distribution: all values are zero")]
    DegenerateDistribution,
    #[error("invalid epsilon: {0} (must be positive and finite)")]
    InvalidEpsilon(f64),
    #[error("incompatible supports: {0} vs {1} bins")]
    IncompatibleSupports(usize, usize),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown layout: {0}")]
    UnknownLayout(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
