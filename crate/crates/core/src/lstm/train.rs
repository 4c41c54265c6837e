use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::cell::{accumulate_gradients, predict_unchecked};
use super::{LstmError, LstmParams};
use crate::dataset::WindowedDataset;
use crate::eval::mse;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LstmConfig {
    pub hidden_size: usize,
    pub batch_size: usize,
    pub forget_bias: f64,
    pub adam: AdamConfig,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            hidden_size: 50,
            batch_size: 32,
            forget_bias: 1.0,
            adam: AdamConfig::default(),
        }
    }
}

/// Train and test MSE (normalized units) after one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub test_mse: f64,
}

pub fn predict(p: &LstmParams, window: &[f64]) -> Result<f64, LstmError> {
    super::sequence_forward(window, p).map(|(y, _)| y)
}

pub fn predict_all(p: &LstmParams, data: &WindowedDataset) -> Vec<f64> {
    data.inputs.iter().map(|w| predict_unchecked(w, p)).collect()
}

fn dataset_mse(p: &LstmParams, data: &WindowedDataset) -> f64 {
    mse(&data.targets, &predict_all(p, data)).expect("non-empty dataset of matching length")
}

/// Mini-batch Adam training over samples in sequence order.
///
/// Each batch contributes the mean of its per-sample squared-error
/// gradients. The same `(data, test, epochs, seed, config)` always yields
/// the same model and history.
pub fn train(
    data: &WindowedDataset,
    test: &WindowedDataset,
    epochs: usize,
    seed: u64,
    config: &LstmConfig,
) -> Result<(LstmParams, Vec<TrainRecord>), LstmError> {
    if data.is_empty() || test.is_empty() {
        return Err(LstmError::EmptyDataset);
    }
    if epochs == 0 || config.batch_size == 0 || config.hidden_size == 0 {
        return Err(LstmError::InvalidConfig(format!(
            "epochs={epochs}, batch_size={}, hidden_size={} must all be positive",
            config.batch_size, config.hidden_size
        )));
    }
    let window = data.window;
    if data
        .inputs
        .iter()
        .chain(&test.inputs)
        .any(|w| w.len() != window || w.is_empty())
    {
        return Err(LstmError::ShapeMismatch(
            "every sample must hold exactly `window` values".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = LstmParams::init(1, config.hidden_size, config.forget_bias, &mut rng);
    let mut adam = AdamState::for_params(&params, config.adam);
    let mut history = Vec::with_capacity(epochs);

    for epoch in 1..=epochs {
        let samples: Vec<_> = data.inputs.iter().zip(&data.targets).collect();
        for batch in samples.chunks(config.batch_size) {
            let mut grads = params.zeros_like();
            let scale = 1.0 / batch.len() as f64;
            for (x, y) in batch {
                accumulate_gradients(x, **y, &params, &mut grads, scale);
            }
            let mut flat = params.to_flat();
            adam.step(&mut flat, &grads.to_flat())?;
            params.set_flat(&flat)?;
        }
        if !params.is_finite() {
            return Err(LstmError::Diverged { epoch });
        }
        history.push(TrainRecord {
            epoch,
            train_mse: dataset_mse(&params, data),
            test_mse: dataset_mse(&params, test),
        });
    }
    Ok((params, history))
}

/// One independent training run of the epoch grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRun {
    pub epochs: usize,
    pub model: LstmParams,
    pub history: Vec<TrainRecord>,
}

impl EpochRun {
    pub fn final_record(&self) -> TrainRecord {
        *self.history.last().expect("training records every epoch")
    }
}

/// Trains a fresh model for each epoch count, in parallel; results keep the
/// order of `epoch_counts`.
pub fn epoch_grid(
    data: &WindowedDataset,
    test: &WindowedDataset,
    epoch_counts: &[usize],
    seed: u64,
    config: &LstmConfig,
) -> Vec<Result<EpochRun, LstmError>> {
    epoch_counts
        .par_iter()
        .map(|&epochs| {
            train(data, test, epochs, seed, config).map(|(model, history)| EpochRun {
                epochs,
                model,
                history,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::make_windows;

    fn small_config() -> LstmConfig {
        LstmConfig {
            hidden_size: 4,
            batch_size: 8,
            ..LstmConfig::default()
        }
    }

    fn sine_data() -> (WindowedDataset, WindowedDataset) {
        let values: Vec<f64> = (0..60).map(|i| 0.5 + 0.4 * (i as f64 * 0.3).sin()).collect();
        let w = make_windows(&values, 5).unwrap();
        (
            w.filter_by_target_index(|i| i < 48),
            w.filter_by_target_index(|i| i >= 48),
        )
    }

    #[test]
    fn deterministic_for_seed() {
        let (tr, te) = sine_data();
        let a = train(&tr, &te, 3, 7, &small_config()).unwrap();
        let b = train(&tr, &te, 3, 7, &small_config()).unwrap();
        assert_eq!(a, b);
        let c = train(&tr, &te, 3, 8, &small_config()).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn history_has_one_record_per_epoch() {
        let (tr, te) = sine_data();
        let (_, hist) = train(&tr, &te, 4, 1, &small_config()).unwrap();
        assert_eq!(hist.iter().map(|r| r.epoch).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(hist.iter().all(|r| r.train_mse >= 0.0 && r.test_mse >= 0.0));
    }

    #[test]
    fn empty_dataset_rejected() {
        let (tr, te) = sine_data();
        let empty = tr.filter_by_target_index(|_| false);
        assert_eq!(
            train(&empty, &te, 1, 0, &small_config()).unwrap_err(),
            LstmError::EmptyDataset
        );
        assert!(matches!(
            train(&tr, &te, 0, 0, &small_config()),
            Err(LstmError::InvalidConfig(_))
        ));
    }

    #[test]
    fn grid_keeps_order_and_prefix_consistency() {
        let (tr, te) = sine_data();
        let runs = epoch_grid(&tr, &te, &[3, 1, 2], 5, &small_config());
        let runs: Vec<_> = runs.into_iter().map(Result::unwrap).collect();
        assert_eq!(runs.iter().map(|r| r.epochs).collect::<Vec<_>>(), vec![3, 1, 2]);
        // in-order sampling makes a shorter run a prefix of a longer one
        assert_eq!(runs[1].history[..], runs[0].history[..1]);
        assert_eq!(runs[2].history[..], runs[0].history[..2]);
    }
}
