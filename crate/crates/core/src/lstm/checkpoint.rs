use serde::{Deserialize, Serialize};

use super::{LstmConfig, LstmError, LstmParams};
use crate::dataset::ScalerParams;

pub const CHECKPOINT_VERSION: u32 = 1;
const FORMAT: &str = "forecast-bench/lstm";

/// Versioned JSON checkpoint. Floats are written in shortest round-trip form
/// and parsed exactly, so save/load is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmCheckpoint {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub epochs: usize,
    pub window: usize,
    pub config: LstmConfig,
    pub scaler: Option<ScalerParams>,
    pub params: LstmParams,
}

impl LstmCheckpoint {
    pub fn new(
        params: LstmParams,
        config: LstmConfig,
        scaler: Option<ScalerParams>,
        seed: u64,
        epochs: usize,
        window: usize,
    ) -> Self {
        Self {
            format: FORMAT.into(),
            version: CHECKPOINT_VERSION,
            seed,
            epochs,
            window,
            config,
            scaler,
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LstmError> {
        let ck: LstmCheckpoint =
            serde_json::from_str(text).map_err(|e| LstmError::Checkpoint(e.to_string()))?;
        if ck.format != FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(LstmError::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                ck.format, ck.version
            )));
        }
        ck.params.check_shapes()?;
        Ok(ck)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = LstmParams::init(1, 6, 1.0, &mut rng);
        let scaler = ScalerParams::new(7726.7749, 12830.123456789).unwrap();
        let ck = LstmCheckpoint::new(params, LstmConfig::default(), Some(scaler), 42, 30, 30);
        let back = LstmCheckpoint::from_json(&ck.to_json()).unwrap();
        let bits = |p: &LstmParams| p.to_flat().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&ck.params), bits(&back.params));
        assert_eq!(ck, back);
    }

    #[test]
    fn rejects_other_versions() {
        let ck = LstmCheckpoint::new(LstmParams::zeros(1, 2), LstmConfig::default(), None, 1, 1, 1);
        let text = ck.to_json().replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(
            LstmCheckpoint::from_json(&text),
            Err(LstmError::Checkpoint(_))
        ));
    }
}
