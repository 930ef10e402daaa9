//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kappa must be strictly positive on the admissible interval: kappa({v}) = {value}")]
    NonPositiveKappa { v: f64, value: f64 },

    #[error(
        "derivative order {order} of {name} disagrees with finite differences at v = {v}: \
         callable {analytic:e}, finite difference {numeric:e} (relative error {rel_err:e})"
    )]
    DerivativeMismatch {
        name: String,
        order: usize,
        v: f64,
        analytic: f64,
        numeric: f64,
        rel_err: f64,
    },

    #[error("k_max = {k_max} is below the minimum supported order 4")]
    InsufficientOrder { k_max: usize },

    #[error("field value {value} at grid index {index} lies outside the admissible interval [{lo}, {hi}]")]
    RangeViolation {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("field is not spectrally resolved: tail level {tail:e} exceeds {tol:e} of the peak {peak:e}")]
    UnresolvedField { tail: f64, peak: f64, tol: f64 },

    #[error("time step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("H^4 norm {h4:e} crossed the blow-up threshold {threshold:e} at t = {t}")]
    BlowupDetected { t: f64, h4: f64, threshold: f64 },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("benchmark reference failed certification: scaled residual {residual:e} exceeds gate {gate:e}")]
    CertificationFailed { residual: f64, gate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ensemble member exceeds the W^{{1,inf}} bound: {norm} > {bound}")]
    EnsembleBoundExceeded { norm: f64, bound: f64 },
}
