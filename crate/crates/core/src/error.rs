//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by geometry construction, analysis, and estimation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("({m}, {n}) is not a usable co-prime pair: need gcd(M, N) = 1 and M, N >= 2")]
    NotCoprime { m: u64, n: u64 },

    #[error("shift {s} outside canonical range [0, {max}]; construct with the displaced flag to allow it")]
    ShiftOutOfRange { s: i64, max: i64 },

    #[error("compression factor {p} does not divide base spacing {m}")]
    CompressionMismatch { p: u64, m: u64 },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("need at least {min} subarrays, got {got}")]
    TooFewSubarrays { min: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {x} out of range [0, {max}]")]
    IndexOutOfRange { x: u64, max: u64 },

    #[error("closed form inapplicable: {count} position(s) shared between subarrays")]
    OverlapsPresent { count: usize },

    #[error("signal too short: need {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },

    #[error("position {position} does not fit in period {period}")]
    PositionOutsidePeriod { position: i64, period: usize },

    #[error("weight function does not belong to this pattern: z(0) = {z0} but the pattern has {elements} elements")]
    WeightMismatch { z0: u64, elements: usize },

    #[error("requested {requested} peaks but only found {found} local maxima at {locations:?}")]
    NotEnoughPeaks {
        requested: usize,
        found: usize,
        locations: Vec<f64>,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("window is degenerate: no side lobe to measure")]
    DegenerateWindow,
}

pub type Result<T> = std::result::Result<T, Error>;
