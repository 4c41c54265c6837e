//! ε-insensitive support vector regression with linear, RBF and sigmoid
//! kernels, and a cross-validated grid search over `gamma` and `C`.

mod grid;
mod kernel;
mod smo;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{grid_search, kfold_ranges, GridCell, GridSpec, SvrGrid};
pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use smo::{dual_objective, fit, SvrConfig, SvrFit, SvrModel};

use crate::dataset::ScalerParams;
use crate::eval::EvalError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvrError {
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0} feature vectors but {1} targets")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("inputs must be finite")]
    NonFinite,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("solver stopped after {iterations} iterations with KKT gap {kkt_gap}")]
    NotConverged {
        kkt_gap: f64,
        iterations: usize,
        model: Box<SvrModel>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("model file: {0}")]
    ModelFile(String),
}

/// Serialized SVR model with the scaler that produced its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModelFile {
    pub format: String,
    pub version: u32,
    pub model: SvrModel,
    pub c: f64,
    pub epsilon: f64,
    pub scaler: Option<ScalerParams>,
}

impl SvrModelFile {
    const FORMAT: &'static str = "forecast-bench/svr";

    pub fn new(model: SvrModel, c: f64, epsilon: f64, scaler: Option<ScalerParams>) -> Self {
        Self {
            format: Self::FORMAT.into(),
            version: 1,
            model,
            c,
            epsilon,
            scaler,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SvrError> {
        let f: SvrModelFile =
            serde_json::from_str(text).map_err(|e| SvrError::ModelFile(e.to_string()))?;
        if f.format != Self::FORMAT || f.version != 1 {
            return Err(SvrError::ModelFile(format!(
                "unsupported model {} v{}",
                f.format, f.version
            )));
        }
        Ok(f)
    }
}
