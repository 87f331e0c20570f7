use std::path::PathBuf;

use thiserror::Error;

use crate::resonance::{ClassTag, CoeffPair};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative order {0} not supported (expected 1..=3)")]
    InvalidOrder(u8),

    #[error("unknown Taylor model kind `{0}`")]
    UnknownKind(String),

    #[error("point lies outside the Taylor model neighborhood (deviation {deviation:.3e} > radius {radius:.3e})")]
    OutsideNeighborhood { deviation: f64, radius: f64 },

    #[error("invalid coefficient pair ({a}, {b}): {reason}")]
    InvalidPair {
        a: i32,
        b: i32,
        reason: &'static str,
    },

    #[error(
        "inconsistent classification for {pair}: analytic {predicted:?}, numerical {observed}"
    )]
    InconsistentClassification {
        pair: CoeffPair,
        predicted: ClassTag,
        observed: String,
    },

    #[error("no sign change found while bracketing {0}")]
    BracketFailure(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("band {k} out of range for grid with Nyquist wavenumber {nyquist:.4}")]
    BandOutOfRange { k: i32, nyquist: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("stability violation at t = {t}: norm grew by factor {growth:.4} in one step")]
    StabilityViolation { t: f64, growth: f64 },

    #[error("boundary contamination at t = {t}: edge amplitude is {ratio:.3e} of peak")]
    BoundaryContamination { t: f64, ratio: f64 },

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("trajectory does not span the requested times: {0}")]
    InsufficientSpan(String),

    #[error("coarse grid n = {0} exceeds the brute-force cost guard (max 32)")]
    CostGuard(usize),

    #[error("malformed snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
