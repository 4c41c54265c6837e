//! Univariate polynomial regression `y = a_0 + a_1 x + ... + a_n x^n`.
//!
//! The feature expansion carries no constant column; the intercept is fitted
//! separately by centering. Inputs are mapped onto `[0, 1]` before raising to
//! powers and the least-squares problem is solved with Householder QR.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{mse, EvalError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("inputs must be finite")]
    NonFinite,
    #[error("no degrees to sweep")]
    EmptySweep,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `[x, x², ..., x^degree]`, with a leading `1` when `include_bias` is set.
pub fn poly_features(x: f64, degree: usize, include_bias: bool) -> Result<Vec<f64>, PolyError> {
    if degree == 0 {
        return Err(PolyError::InvalidDegree);
    }
    let mut out = Vec::with_capacity(degree + usize::from(include_bias));
    if include_bias {
        out.push(1.0);
    }
    let mut p = 1.0;
    for _ in 0..degree {
        p *= x;
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyModel {
    pub degree: usize,
    pub intercept: f64,
    /// `a_1 ..= a_n`, applied to the scaled input.
    pub coefficients: Vec<f64>,
    /// Raw `x` is mapped to `(x - offset) / span` before powers.
    pub feature_offset: f64,
    pub feature_span: f64,
}

impl PolyModel {
    pub fn scale_input(&self, x: f64) -> f64 {
        (x - self.feature_offset) / self.feature_span
    }

    /// Horner evaluation on the scaled input.
    pub fn predict(&self, x: f64) -> f64 {
        let t = self.scale_input(x);
        let mut acc = 0.0;
        for a in self.coefficients.iter().rev() {
            acc = acc * t + a;
        }
        self.intercept + acc * t
    }

    pub fn predict_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(*x)).collect()
    }
}

/// Relative threshold on `|R_kk|` below which the design counts as singular.
const RANK_TOL: f64 = 1e-13;

/// Least-squares solution of `min ||A w - b||` for a column-major `n x m`
/// matrix via Householder reflections. Fails if `A` is numerically rank
/// deficient.
fn householder_lstsq(
    mut a: Vec<Vec<f64>>,
    mut b: Vec<f64>,
) -> Result<Vec<f64>, PolyError> {
    let m = a.len();
    let n = b.len();
    let col_scale = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut diag = vec![0.0; m];
    for k in 0..m {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_TOL * col_scale || norm == 0.0 {
            return Err(PolyError::RankDeficient(format!(
                "column {} is numerically dependent on the previous ones",
                k + 1
            )));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e_1, stored in place of column k below the diagonal
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k + 1) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&b[k..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in b[k..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }
    debug_assert!(n >= m);
    // back substitution on R (upper triangle of the transformed columns)
    let mut w = vec![0.0; m];
    for k in (0..m).rev() {
        let mut s = b[k];
        for j in k + 1..m {
            s -= a[j][k] * w[j];
        }
        w[k] = s / diag[k];
    }
    Ok(w)
}

/// Fits a degree-`degree` polynomial by least squares.
pub fn fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyModel, PolyError> {
    if degree == 0 {
        return Err(PolyError::InvalidDegree);
    }
    if xs.len() != ys.len() {
        return Err(PolyError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < degree + 1 {
        return Err(PolyError::RankDeficient(format!(
            "{} distinct x values cannot determine a degree-{degree} polynomial",
            distinct.len()
        )));
    }
    let offset = distinct[0];
    let span = distinct[distinct.len() - 1] - offset;

    let n = xs.len() as f64;
    let scaled: Vec<f64> = xs.iter().map(|x| (x - offset) / span).collect();
    let mut columns: Vec<Vec<f64>> = (1..=degree)
        .map(|k| scaled.iter().map(|t| t.powi(k as i32)).collect())
        .collect();
    let col_means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    for (c, mean) in columns.iter_mut().zip(&col_means) {
        c.iter_mut().for_each(|v| *v -= mean);
    }
    let y_mean = ys.iter().sum::<f64>() / n;
    let centered: Vec<f64> = ys.iter().map(|y| y - y_mean).collect();

    let coefficients = householder_lstsq(columns, centered)?;
    let intercept = y_mean
        - coefficients
            .iter()
            .zip(&col_means)
            .map(|(a, m)| a * m)
            .sum::<f64>();
    Ok(PolyModel {
        degree,
        intercept,
        coefficients,
        feature_offset: offset,
        feature_span: span,
    })
}

/// Paired inputs and targets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub degree: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub model: PolyModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSweep {
    pub rows: Vec<SweepRow>,
    pub best: usize,
}

impl DegreeSweep {
    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }
}

fn sweep_one(train: &CurveData, test: &CurveData, degree: usize) -> Result<SweepRow, PolyError> {
    let model = fit(&train.x, &train.y, degree)?;
    Ok(SweepRow {
        degree,
        train_mse: mse(&train.y, &model.predict_many(&train.x))?,
        test_mse: mse(&test.y, &model.predict_many(&test.x))?,
        model,
    })
}

/// Every degree fitted independently; results in input order. Lets callers
/// keep the rows that succeeded when some degree fails.
pub fn sweep_rows(
    train: &CurveData,
    test: &CurveData,
    degrees: &[usize],
) -> Vec<Result<SweepRow, PolyError>> {
    degrees
        .par_iter()
        .map(|d| sweep_one(train, test, *d))
        .collect()
}

/// Fits each degree on `train`, scores on `test`; best is the lowest test
/// MSE, ties to the lower degree.
pub fn degree_sweep(
    train: &CurveData,
    test: &CurveData,
    degrees: &[usize],
) -> Result<DegreeSweep, PolyError> {
    if degrees.is_empty() {
        return Err(PolyError::EmptySweep);
    }
    let rows = sweep_rows(train, test, degrees)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let best = best_index(&rows);
    Ok(DegreeSweep { rows, best })
}

pub(crate) fn best_index(rows: &[SweepRow]) -> usize {
    (0..rows.len())
        .min_by(|&a, &b| {
            rows[a]
                .test_mse
                .total_cmp(&rows[b].test_mse)
                .then(rows[a].degree.cmp(&rows[b].degree))
        })
        .unwrap_or(0)
}
