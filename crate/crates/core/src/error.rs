use std::path::PathBuf;

use crate::fock::BasisIndex;

/// Errors produced by the synthesis library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("basis index {index} is outside the triangle m + n <= {j_max}")]
    IndexOutOfRange { index: BasisIndex, j_max: usize },

    #[error("offset {offset} is outside a space of dimension {dim}")]
    OffsetOutOfRange { offset: usize, dim: usize },

    #[error("state dimension mismatch: j_max {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("coefficients have zero norm; cannot normalize")]
    ZeroNorm,

    #[error("coefficient table has {got} entries, expected {expected}")]
    CoefficientCount { got: usize, expected: usize },

    #[error("channel {channel} does not support the nonlinear Rabi regime")]
    UnsupportedRegime { channel: u8 },

    #[error("invalid Rabi regime: {0}")]
    InvalidRegime(String),

    #[error("unknown channel id {0} (expected 1..=5)")]
    UnknownChannel(u8),

    #[error("pulse infeasible: channel {channel} cannot cancel {cancel} (relative Rabi factor {rel_rabi:e}, amplitude {amplitude:e})")]
    PulseInfeasible {
        channel: u8,
        cancel: BasisIndex,
        rel_rabi: f64,
        amplitude: f64,
    },

    #[error("channel {channel} has no partner for {cancel}")]
    NoPartner { channel: u8, cancel: BasisIndex },

    #[error("synthesis failed: residual vacuum infidelity {residual:e} exceeds {tolerance:e}")]
    SynthesisFailed { residual: f64, tolerance: f64 },

    #[error("expected a {expected} sequence, got {got}")]
    WrongDirection {
        expected: &'static str,
        got: &'static str,
    },

    #[error("truncation search exceeded the cutoff cap {cap}")]
    TruncationCap { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
