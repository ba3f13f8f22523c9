use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers, the simulator and the artifact I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration could not be parsed or failed validation.
    #[error("configuration error: {0}")]
    Config(String),

    /// The explicit scheme would be unstable for this grid.
    #[error("stability bound violated: dt * max_event_rate = {dt} * {rate} = {product} > 1")]
    Stability { dt: f64, rate: f64, product: f64 },

    /// A non-finite value appeared in the backward sweep.
    #[error("non-finite value at regime {regime}, time index {t_index}, inventory {x}")]
    NonFinite {
        regime: usize,
        t_index: usize,
        x: i64,
    },

    /// A computation was refused because it would exceed a configured cap.
    #[error("refused: {0}")]
    Refused(String),

    /// A region table does not have the continue/limit/market band structure.
    #[error("non-band region structure at regime {regime}, time index {t_index}, {side} side")]
    Structure {
        regime: usize,
        t_index: usize,
        side: &'static str,
    },

    /// Too many simulated paths left the policy grid.
    #[error("{excluded} of {paths} paths left the policy grid (limit is 1%)")]
    GridExit { excluded: usize, paths: usize },

    #[error("malformed artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
