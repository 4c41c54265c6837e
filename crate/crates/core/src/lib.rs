//! Forecasting benchmark for daily price series.
//!
//! Three model families are trained from scratch on the same chronological
//! split and ranked by mean square error:
//!
//! - [`lstm`]: single-layer LSTM over sliding windows, trained with Adam
//!   across an epoch grid;
//! - [`svr`]: ε-SVR with linear, RBF and sigmoid kernels, tuned by a
//!   cross-validated grid over `gamma` and `C`;
//! - [`polyreg`]: polynomial least squares swept over degrees.
//!
//! [`dataset`] turns an OHLCV CSV into normalized model inputs, [`eval`]
//! scores and ranks the models, and [`pipeline`] wires the stages into the
//! `prepare` / `run` / `compare` commands exposed by the `forecast-bench`
//! binary.

pub mod config;
pub mod dataset;
pub mod eval;
pub mod lstm;
pub mod pipeline;
pub mod polyreg;
pub mod svr;
