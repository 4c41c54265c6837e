//! Single-layer LSTM regressor trained from scratch.
//!
//! The cell follows the classic gate formulation with row-vector weights
//! (`x_t · W`), unrolled over a window of past values; a linear head maps the
//! last hidden state to a scalar prediction. Gradients are computed by
//! backpropagation through time and applied with Adam.

mod adam;
mod cell;
mod checkpoint;
mod params;
mod train;

use thiserror::Error;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use cell::{bptt_gradients, cell_forward, sequence_forward, LstmState, SequenceCache, StepCache};
pub use checkpoint::{LstmCheckpoint, CHECKPOINT_VERSION};
pub use params::{GateParams, LstmParams};
pub use train::{epoch_grid, predict, predict_all, train, EpochRun, LstmConfig, TrainRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LstmError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("window must contain at least one step")]
    EmptyWindow,
    #[error("training and test datasets must be non-empty")]
    EmptyDataset,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parameters became non-finite during epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
