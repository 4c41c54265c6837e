use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{KernelKind, KernelSpec};
use super::smo::{fit, SvrConfig};
use super::SvrError;
use crate::eval::mse;

/// The hyperparameter grid and solver settings shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kernels: Vec<KernelKind>,
    pub gammas: Vec<f64>,
    pub cs: Vec<f64>,
    pub folds: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub coef0: f64,
    pub max_iter: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            kernels: vec![KernelKind::Rbf, KernelKind::Sigmoid, KernelKind::Linear],
            gammas: vec![0.001, 0.01, 0.1, 1.0],
            cs: vec![1e0, 1e1, 1e2, 1e3],
            folds: 5,
            epsilon: 0.1,
            tol: 1e-3,
            coef0: 0.0,
            max_iter: None,
        }
    }
}

impl GridSpec {
    pub fn config_for(&self, kind: KernelKind, gamma: f64, c: f64) -> SvrConfig {
        let kernel = KernelSpec {
            kind,
            gamma,
            coef0: self.coef0,
        };
        SvrConfig {
            kernel,
            c,
            epsilon: self.epsilon,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    /// Cells in evaluation order: kernels as listed, then ascending gamma,
    /// then ascending C.
    pub fn cells(&self) -> Vec<(KernelKind, f64, f64)> {
        let mut gammas = self.gammas.clone();
        gammas.sort_by(f64::total_cmp);
        let mut cs = self.cs.clone();
        cs.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(self.kernels.len() * gammas.len() * cs.len());
        for &k in &self.kernels {
            for &g in &gammas {
                for &c in &cs {
                    out.push((k, g, c));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub kernel: KernelKind,
    pub gamma: f64,
    pub c: f64,
    pub cv_mse: f64,
    /// Number of folds whose solve hit the iteration cap.
    pub unconverged_folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrGrid {
    pub cells: Vec<GridCell>,
    pub best: usize,
}

impl SvrGrid {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }
}

/// Contiguous, unshuffled fold boundaries; the first `n % k` folds hold one
/// extra sample.
pub fn kfold_ranges(n: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    let base = n / k;
    let extra = n % k;
    let mut start = 0;
    (0..k)
        .map(|f| {
            let len = base + usize::from(f < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn cross_validate(
    xs: &[Vec<f64>],
    ys: &[f64],
    cfg: &SvrConfig,
    folds: &[std::ops::Range<usize>],
) -> Result<(f64, usize), SvrError> {
    let mut total = 0.0;
    let mut unconverged = 0;
    for fold in folds {
        let (train_x, train_y): (Vec<Vec<f64>>, Vec<f64>) = xs
            .iter()
            .zip(ys)
            .enumerate()
            .filter(|(i, _)| !fold.contains(i))
            .map(|(_, (x, y))| (x.clone(), *y))
            .unzip();
        let fitted = fit(&train_x, &train_y, cfg)?;
        if !fitted.converged {
            unconverged += 1;
        }
        let preds: Vec<f64> = xs[fold.clone()]
            .iter()
            .map(|x| fitted.model.predict_unchecked(x))
            .collect();
        total += mse(&ys[fold.clone()], &preds)?;
    }
    Ok((total / folds.len() as f64, unconverged))
}

/// Exhaustive `kernel x gamma x C` search scored by k-fold CV MSE.
///
/// Cells run in parallel but the returned grid is always in
/// [`GridSpec::cells`] order, and the best cell is the first minimum in that
/// order.
pub fn grid_search(xs: &[Vec<f64>], ys: &[f64], spec: &GridSpec) -> Result<SvrGrid, SvrError> {
    if spec.kernels.is_empty() || spec.gammas.is_empty() || spec.cs.is_empty() {
        return Err(SvrError::InvalidConfig("grid lists must be non-empty".into()));
    }
    if xs.len() != ys.len() {
        return Err(SvrError::LengthMismatch(xs.len(), ys.len()));
    }
    if spec.folds < 2 {
        return Err(SvrError::InvalidConfig(format!(
            "need at least 2 folds, got {}",
            spec.folds
        )));
    }
    let folds = kfold_ranges(xs.len(), spec.folds);
    let largest = folds.iter().map(|r| r.len()).max().unwrap_or(0);
    if xs.len() < spec.folds || xs.len() - largest < 2 {
        return Err(SvrError::TooFewSamples {
            needed: spec.folds.max(largest + 2),
            got: xs.len(),
        });
    }

    let cells = spec
        .cells()
        .into_par_iter()
        .map(|(kind, gamma, c)| {
            let cfg = spec.config_for(kind, gamma, c);
            let (cv_mse, unconverged_folds) = cross_validate(xs, ys, &cfg, &folds)?;
            if unconverged_folds > 0 {
                warn!(
                    "svr {kind} gamma={gamma} C={c}: {unconverged_folds} fold(s) hit the iteration cap"
                );
            }
            Ok(GridCell {
                kernel: kind,
                gamma,
                c,
                cv_mse,
                unconverged_folds,
            })
        })
        .collect::<Result<Vec<_>, SvrError>>()?;

    let mut best = 0;
    for (i, cell) in cells.iter().enumerate() {
        if cell.cv_mse < cells[best].cv_mse {
            best = i;
        }
    }
    Ok(SvrGrid { cells, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_ranges_cover_in_order() {
        let r = kfold_ranges(12, 5);
        assert_eq!(r, vec![0..3, 3..6, 6..8, 8..10, 10..12]);
        let r = kfold_ranges(10, 5);
        assert!(r.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn paper_grid_has_48_cells_in_order() {
        let cells = GridSpec::default().cells();
        assert_eq!(cells.len(), 48);
        assert_eq!(cells[0], (KernelKind::Rbf, 0.001, 1.0));
        assert_eq!(cells[1], (KernelKind::Rbf, 0.001, 10.0));
        assert_eq!(cells[16].0, KernelKind::Sigmoid);
        assert_eq!(cells[47], (KernelKind::Linear, 1.0, 1000.0));
    }

    #[test]
    fn too_few_samples() {
        let xs: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let ys = vec![0.0, 1.0, 2.0, 3.0];
        assert!(matches!(
            grid_search(&xs, &ys, &GridSpec::default()),
            Err(SvrError::TooFewSamples { .. })
        ));
    }
}
