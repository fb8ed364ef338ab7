use thiserror::Error;

/// Errors raised across the library.
///
/// Variants carry whatever partial state the caller needs to diagnose the
/// failure (residual histories, last good integrator state, truncated rows).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("Keller-Osserman condition (f2) violated: tail of 1/H decays like tau^{tail_exponent:.6} (needs < -1)")]
    KellerOssermanViolation { tail_exponent: f64 },

    #[error("limit not detected for {quantity}: last estimates {last:?}")]
    LimitNotDetected { quantity: &'static str, last: Vec<f64> },

    #[error("condition {label} violated: {detail}")]
    ConditionViolation { label: &'static str, detail: String },

    #[error("integration failed at r = {r:.6e} (u = {u:.6e}, u' = {v:.6e}): {reason}")]
    IntegrationFailure { r: f64, u: f64, v: f64, reason: String },

    #[error("nonlinear solve failed after {} iterations: {reason}", residual_history.len())]
    SolveFailure { reason: String, residual_history: Vec<f64> },

    #[error("exhaustion stopped after levels {completed:?}: {source}")]
    ExhaustionFailure { completed: Vec<f64>, centre_values: Vec<f64>, source: Box<Error> },

    #[error("report truncated: {reason} ({} rows available)", rows.len())]
    ReportTruncated { reason: String, rows: Vec<crate::report::ReportRow> },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("certification failed: worst relative margin {worst_margin:.3e}")]
    CertificationFailure { worst_margin: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
