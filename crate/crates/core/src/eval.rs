//! Mean square error and the cross-model comparison report.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ScalerParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("length mismatch: {0} targets vs {1} predictions")]
    LengthMismatch(usize, usize),
    #[error("cannot compute MSE of empty vectors")]
    Empty,
    #[error("no results to compare")]
    EmptyResults,
    #[error("result `{0}` has a negative or non-finite MSE")]
    InvalidResult(String),
}

const PAIRWISE_BLOCK: usize = 32;

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// `(1/n) Σ (y_true - y_pred)²`, accumulated pairwise.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let sq: Vec<f64> = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .collect();
    Ok(pairwise_sum(&sq) / sq.len() as f64)
}

/// MSE of normalized predictions in both normalized and price units.
pub fn mse_both_scales(
    y_true: &[f64],
    y_pred: &[f64],
    scaler: &ScalerParams,
) -> Result<(f64, f64), EvalError> {
    let normalized = mse(y_true, y_pred)?;
    let raw = mse(&scaler.inverse_scale(y_true), &scaler.inverse_scale(y_pred))?;
    Ok((normalized, raw))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub model_name: String,
    pub mse_normalized: f64,
    pub mse_raw: f64,
    /// Winning hyperparameters, e.g. `epochs=30` or `kernel=linear gamma=0.001 c=1000`.
    pub config_summary: String,
}

impl ModelResult {
    pub fn new(
        model_name: impl Into<String>,
        mse_normalized: f64,
        mse_raw: f64,
        config_summary: impl Into<String>,
    ) -> Self {
        Self {
            model_name: model_name.into(),
            mse_normalized,
            mse_raw,
            config_summary: config_summary.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub results: Vec<ModelResult>,
    pub winner: String,
    pub dataset_fingerprint: String,
}

fn rank(a: &ModelResult, b: &ModelResult) -> Ordering {
    a.mse_normalized
        .total_cmp(&b.mse_normalized)
        .then_with(|| a.model_name.cmp(&b.model_name))
}

/// Sorts results by normalized MSE (ties by name) and names the winner.
pub fn compare(
    mut results: Vec<ModelResult>,
    dataset_fingerprint: impl Into<String>,
) -> Result<EvalReport, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyResults);
    }
    if let Some(bad) = results.iter().find(|r| {
        !(r.mse_normalized.is_finite() && r.mse_normalized >= 0.0)
            || !(r.mse_raw.is_finite() && r.mse_raw >= 0.0)
    }) {
        return Err(EvalError::InvalidResult(bad.model_name.clone()));
    }
    results.sort_by(rank);
    Ok(EvalReport {
        winner: results[0].model_name.clone(),
        results,
        dataset_fingerprint: dataset_fingerprint.into(),
    })
}

impl EvalReport {
    /// Plain-text table, one row per model, best first.
    pub fn to_text(&self) -> String {
        let name_w = self
            .results
            .iter()
            .map(|r| r.model_name.len())
            .chain(std::iter::once("algorithm model".len()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<name_w$}  {:>22}  {:>22}  config",
            "algorithm model", "MSE (normalized)", "MSE (raw)"
        );
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:>22}  {:>22}  {}",
                r.model_name,
                format!("{}", r.mse_normalized),
                format!("{:.6}", r.mse_raw),
                r.config_summary
            );
        }
        let _ = writeln!(out, "\nwinner: {}", self.winner);
        let _ = writeln!(out, "dataset: {}", self.dataset_fingerprint);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 3.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(mse(&[1.0], &[1.0, 2.0]), Err(EvalError::LengthMismatch(1, 2)));
        assert_eq!(mse(&[], &[]), Err(EvalError::Empty));
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }

    #[test]
    fn scales_relate_by_span_squared() {
        let s = ScalerParams::new(100.0, 300.0).unwrap();
        let (n, r) = mse_both_scales(&[0.1, 0.5, 0.9], &[0.2, 0.4, 1.1], &s).unwrap();
        assert!((r - n * 200.0 * 200.0).abs() <= 1e-9 * r);
    }

    #[test]
    fn compare_single_and_tie() {
        let one = compare(vec![ModelResult::new("A", 1.0, 1.0, "")], "fp").unwrap();
        assert_eq!(one.winner, "A");
        let tie = compare(
            vec![
                ModelResult::new("beta", 2.0, 2.0, ""),
                ModelResult::new("alpha", 2.0, 2.0, ""),
            ],
            "fp",
        )
        .unwrap();
        assert_eq!(tie.winner, "alpha");
        assert_eq!(tie.results[1].model_name, "beta");
        assert_eq!(compare(vec![], "fp"), Err(EvalError::EmptyResults));
        assert!(matches!(
            compare(vec![ModelResult::new("x", f64::NAN, 1.0, "")], "fp"),
            Err(EvalError::InvalidResult(_))
        ));
    }

    #[test]
    fn text_report_lists_every_model() {
        let r = compare(
            vec![
                ModelResult::new("Long Short Term Memory", 0.5, 10.0, "epochs=30"),
                ModelResult::new("Support Vector Machine", 0.1, 2.0, "kernel=linear"),
            ],
            "abc",
        )
        .unwrap();
        let text = r.to_text();
        assert!(text.contains("winner: Support Vector Machine"));
        assert_eq!(text.lines().filter(|l| l.contains("epochs=30")).count(), 1);
    }
}
