//! Run configuration, loaded from a TOML file with one section per stage.
//!
//! ```toml
//! seed = 42
//!
//! [data]
//! target_column = "close"
//! train_fraction = 0.8
//! window = 30
//!
//! [lstm]
//! epochs = [10, 30, 50, 80, 100]
//! hidden_size = 50
//!
//! [svr]
//! kernels = ["rbf", "sigmoid", "linear"]
//! gammas = [0.001, 0.01, 0.1, 1.0]
//! cs = [1.0, 10.0, 100.0, 1000.0]
//!
//! [poly]
//! degrees = [2, 4, 6, 9, 11]
//! ```
//!
//! Every key is optional; omitted keys take the defaults shown by
//! [`RunConfig::default`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::PriceColumn;
use crate::lstm::{AdamConfig, LstmConfig};
use crate::svr::{GridSpec, KernelKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub target_column: PriceColumn,
    pub train_fraction: f64,
    pub window: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            target_column: PriceColumn::Close,
            train_fraction: 0.8,
            window: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LstmSection {
    pub epochs: Vec<usize>,
    pub hidden_size: usize,
    pub batch_size: usize,
    pub forget_bias: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
}

impl Default for LstmSection {
    fn default() -> Self {
        let base = LstmConfig::default();
        Self {
            epochs: vec![10, 30, 50, 80, 100],
            hidden_size: base.hidden_size,
            batch_size: base.batch_size,
            forget_bias: base.forget_bias,
            learning_rate: base.adam.lr,
            beta1: base.adam.beta1,
            beta2: base.adam.beta2,
            adam_eps: base.adam.eps,
        }
    }
}

impl LstmSection {
    pub fn model_config(&self) -> LstmConfig {
        LstmConfig {
            hidden_size: self.hidden_size,
            batch_size: self.batch_size,
            forget_bias: self.forget_bias,
            adam: AdamConfig {
                lr: self.learning_rate,
                beta1: self.beta1,
                beta2: self.beta2,
                eps: self.adam_eps,
            },
        }
    }
}

/// What the SVR and polynomial models regress on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Time index of the bar.
    #[default]
    Time,
    /// The preceding `window` normalized values (SVR) or the single
    /// preceding value (polynomial).
    Lagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrSection {
    pub kernels: Vec<KernelKind>,
    pub gammas: Vec<f64>,
    pub cs: Vec<f64>,
    pub folds: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub coef0: f64,
    pub max_iter: Option<usize>,
    pub features: FeatureMode,
}

impl Default for SvrSection {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            kernels: g.kernels,
            gammas: g.gammas,
            cs: g.cs,
            folds: g.folds,
            epsilon: g.epsilon,
            tol: g.tol,
            coef0: g.coef0,
            max_iter: g.max_iter,
            features: FeatureMode::Time,
        }
    }
}

impl SvrSection {
    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            kernels: self.kernels.clone(),
            gammas: self.gammas.clone(),
            cs: self.cs.clone(),
            folds: self.folds,
            epsilon: self.epsilon,
            tol: self.tol,
            coef0: self.coef0,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolySection {
    pub degrees: Vec<usize>,
    pub features: FeatureMode,
}

impl Default for PolySection {
    fn default() -> Self {
        Self {
            degrees: vec![2, 4, 6, 9, 11],
            features: FeatureMode::Time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub data: DataSection,
    pub lstm: LstmSection,
    pub svr: SvrSection,
    pub poly: PolySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out_dir: PathBuf::from("out"),
            seed: 42,
            data: DataSection::default(),
            lstm: LstmSection::default(),
            svr: SvrSection::default(),
            poly: PolySection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let f = self.data.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return bad(format!("data.train_fraction must be in (0, 1), got {f}"));
        }
        if self.data.window == 0 {
            return bad("data.window must be positive".into());
        }
        if self.lstm.epochs.is_empty() || self.lstm.epochs.contains(&0) {
            return bad("lstm.epochs must be a non-empty list of positive counts".into());
        }
        if self.lstm.hidden_size == 0 || self.lstm.batch_size == 0 {
            return bad("lstm.hidden_size and lstm.batch_size must be positive".into());
        }
        if self.svr.kernels.is_empty() || self.svr.gammas.is_empty() || self.svr.cs.is_empty() {
            return bad("svr.kernels, svr.gammas and svr.cs must be non-empty".into());
        }
        if self.svr.folds < 2 {
            return bad("svr.folds must be at least 2".into());
        }
        if self.poly.degrees.is_empty() || self.poly.degrees.contains(&0) {
            return bad("poly.degrees must be a non-empty list of positive degrees".into());
        }
        Ok(())
    }

    /// Short hash of every setting that affects numeric output. Paths are
    /// excluded so the same run in another directory hashes identically.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.input = None;
        canonical.out_dir = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
