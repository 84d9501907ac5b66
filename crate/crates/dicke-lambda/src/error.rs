//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("steady-state solve failed: residual {residual:.3e} above tolerance {tolerance:.1e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    #[error("integrator step underflow at t = {t:.6e} (dt = {dt:.3e}); reduce the integration span or stiffness")]
    Stiffness { t: f64, dt: f64 },

    #[error("singular two-photon denominator: {0}")]
    Singularity(String),

    #[error("no transparency dip found in scan")]
    NoDip,

    #[error("fit did not converge after {iterations} iterations (last rms residual {residual:.3e})")]
    FitFailure { iterations: usize, residual: f64 },

    #[error("steady-state march did not converge: final residual {residual:.3e}")]
    NonConvergence { residual: f64 },

    #[error("trajectory trace drifted by {drift:.3e} (tolerance {tolerance:.1e})")]
    TraceDrift { drift: f64, tolerance: f64 },

    #[error("medium length not set; required for pulse delay")]
    MissingLength,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("scan point {index} (delta1 = {delta1}) failed: {source}")]
    ScanPoint {
        index: usize,
        delta1: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("group velocity out of model validity: 1 + delta = {one_plus_delta:.3e} <= 0")]
    SuperluminalRegime { one_plus_delta: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_scan_point(self, index: usize, delta1: f64) -> Error {
        Error::ScanPoint {
            index,
            delta1,
            source: Box::new(self),
        }
    }
}
