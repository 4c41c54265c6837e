//! ε-SVR dual solver.
//!
//! The dual is posed over `2n` variables `a = (α, α*)`:
//!
//! ```text
//! min ½ aᵀQa + pᵀa   s.t.  yᵀa = 0,  0 ≤ a_t ≤ C
//! y_t = +1, p_t = ε - y_i    for t = i < n          (α_i)
//! y_t = -1, p_t = ε + y_i    for t = n + i          (α*_i)
//! Q_st = y_s y_t K(x_s mod n, x_t mod n)
//! ```
//!
//! and solved by sequential minimal optimization with second-order working
//! set selection. The regression coefficients are `β_i = α_i - α*_i` and the
//! prediction is `f(x) = Σ β_i K(x_i, x) + b`.

use serde::{Deserialize, Serialize};

use super::kernel::{gram, KernelSpec};
use super::SvrError;

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    pub kernel: KernelSpec,
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    /// Iteration cap; `None` means `100 * n`.
    pub max_iter: Option<usize>,
}

impl SvrConfig {
    pub fn new(kernel: KernelSpec, c: f64) -> Self {
        Self {
            kernel,
            c,
            epsilon: 0.1,
            tol: 1e-3,
            max_iter: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        self.kernel.validate()?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvrError::InvalidConfig(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SvrError::InvalidConfig(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.tol > 0.0) {
            return Err(SvrError::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: KernelSpec,
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i - α*_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
}

impl SvrModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64, SvrError> {
        if let Some(sv) = self.support_vectors.first() {
            if sv.len() != x.len() {
                return Err(SvrError::DimensionMismatch(sv.len(), x.len()));
            }
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, a)| a * self.kernel.apply(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>, SvrError> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Result of a fit, including the solver's convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub model: SvrModel,
    /// `β` for every training point, support vector or not.
    pub coefficients: Vec<f64>,
    /// Dual objective `½ βᵀKβ + ε Σ|β_i| - yᵀβ` at the returned point.
    pub objective: f64,
    pub iterations: usize,
    /// Final maximal KKT violation `m(a) - M(a)`.
    pub kkt_gap: f64,
    pub converged: bool,
}

impl SvrFit {
    /// Turns an unconverged fit into [`SvrError::NotConverged`].
    pub fn into_result(self) -> Result<SvrModel, SvrError> {
        if self.converged {
            Ok(self.model)
        } else {
            Err(SvrError::NotConverged {
                kkt_gap: self.kkt_gap,
                iterations: self.iterations,
                model: Box::new(self.model),
            })
        }
    }
}

struct Problem<'a> {
    n: usize,
    k: &'a [f64],
    c: f64,
}

impl Problem<'_> {
    #[inline]
    fn sign(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    /// `Q_st`
    #[inline]
    fn q(&self, s: usize, t: usize) -> f64 {
        self.sign(s) * self.sign(t) * self.kernel(s, t)
    }

    #[inline]
    fn kernel(&self, s: usize, t: usize) -> f64 {
        self.k[(s % self.n) * self.n + (t % self.n)]
    }

    #[inline]
    fn qd(&self, t: usize) -> f64 {
        let i = t % self.n;
        self.k[i * self.n + i]
    }

    fn is_upper(&self, a: f64) -> bool {
        a >= self.c
    }

    fn is_lower(a: f64) -> bool {
        a <= 0.0
    }

    /// Second-order working set selection. Returns `None` when the maximal
    /// violation is below `tol`, along with the violation.
    fn select(&self, a: &[f64], g: &[f64], tol: f64) -> (Option<(usize, usize)>, f64) {
        let l = 2 * self.n;
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        for t in 0..l {
            if self.sign(t) > 0.0 {
                if !self.is_upper(a[t]) && -g[t] >= gmax {
                    gmax = -g[t];
                    gmax_idx = Some(t);
                }
            } else if !Self::is_lower(a[t]) && g[t] >= gmax {
                gmax = g[t];
                gmax_idx = Some(t);
            }
        }

        let mut gmax2 = f64::NEG_INFINITY;
        let mut gmin_idx = None;
        let mut obj_diff_min = f64::INFINITY;
        let i = gmax_idx;
        for t in 0..l {
            let grad_diff = if self.sign(t) > 0.0 {
                if Self::is_lower(a[t]) {
                    continue;
                }
                gmax2 = gmax2.max(g[t]);
                gmax + g[t]
            } else {
                if self.is_upper(a[t]) {
                    continue;
                }
                gmax2 = gmax2.max(-g[t]);
                gmax - g[t]
            };
            if let Some(i) = i {
                if grad_diff > 0.0 {
                    // K_ii + K_tt - 2 K_it, whatever the signs of i and t
                    let quad = self.qd(i) + self.qd(t) - 2.0 * self.kernel(i, t);
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj_diff = -(grad_diff * grad_diff) / quad;
                    if obj_diff <= obj_diff_min {
                        gmin_idx = Some(t);
                        obj_diff_min = obj_diff;
                    }
                }
            }
        }

        let gap = gmax + gmax2;
        match (gmax_idx, gmin_idx) {
            (Some(i), Some(j)) if gap >= tol => (Some((i, j)), gap),
            _ => (None, gap.max(0.0)),
        }
    }

    fn update_pair(&self, a: &mut [f64], g: &[f64], i: usize, j: usize) {
        let c = self.c;
        let qij = self.q(i, j);
        if self.sign(i) != self.sign(j) {
            let quad = self.qd(i) + self.qd(j) + 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let quad = self.qd(i) + self.qd(j) - 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
    }

    /// Offset `ρ` with `b = -ρ`: the mean of `y_t G_t` over free variables,
    /// or the midpoint of the feasible interval when none are free.
    fn rho(&self, a: &[f64], g: &[f64]) -> f64 {
        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        let mut free = 0usize;
        let mut sum_free = 0.0;
        for t in 0..2 * self.n {
            let y = self.sign(t);
            let yg = y * g[t];
            if self.is_upper(a[t]) {
                if y < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if Self::is_lower(a[t]) {
                if y > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free += yg;
            }
        }
        if free > 0 {
            sum_free / free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

/// Dual objective in terms of the regression coefficients.
pub fn dual_objective(k: &[f64], y: &[f64], beta: &[f64], epsilon: f64) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        if beta[i] == 0.0 {
            continue;
        }
        let row: f64 = (0..n).map(|j| k[i * n + j] * beta[j]).sum();
        quad += beta[i] * row;
    }
    0.5 * quad + epsilon * beta.iter().map(|b| b.abs()).sum::<f64>()
        - y.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()
}

fn validate_data(xs: &[Vec<f64>], ys: &[f64]) -> Result<usize, SvrError> {
    if xs.len() != ys.len() {
        return Err(SvrError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(SvrError::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let dim = xs[0].len();
    if dim == 0 {
        return Err(SvrError::DimensionMismatch(0, 1));
    }
    if let Some(bad) = xs.iter().find(|x| x.len() != dim) {
        return Err(SvrError::DimensionMismatch(dim, bad.len()));
    }
    if xs.iter().flatten().chain(ys).any(|v| !v.is_finite()) {
        return Err(SvrError::NonFinite);
    }
    Ok(dim)
}

/// Trains an ε-SVR on `(xs, ys)`.
///
/// When all targets are identical the solution is the constant `b = y` with
/// no support vectors. An unconverged solve still yields a model; check
/// [`SvrFit::converged`] or call [`SvrFit::into_result`].
pub fn fit(xs: &[Vec<f64>], ys: &[f64], cfg: &SvrConfig) -> Result<SvrFit, SvrError> {
    cfg.validate()?;
    validate_data(xs, ys)?;
    let n = xs.len();

    if ys.iter().all(|y| *y == ys[0]) {
        return Ok(SvrFit {
            model: SvrModel {
                kernel: cfg.kernel,
                support_vectors: Vec::new(),
                dual_coefs: Vec::new(),
                bias: ys[0],
            },
            coefficients: vec![0.0; n],
            objective: 0.0,
            iterations: 0,
            kkt_gap: 0.0,
            converged: true,
        });
    }

    let k = gram(&cfg.kernel, xs);
    let problem = Problem { n, k: &k, c: cfg.c };
    let l = 2 * n;
    let mut a = vec![0.0; l];
    let mut g: Vec<f64> = (0..l)
        .map(|t| {
            if t < n {
                cfg.epsilon - ys[t]
            } else {
                cfg.epsilon + ys[t - n]
            }
        })
        .collect();

    let max_iter = cfg.max_iter.unwrap_or(100 * n).max(1);
    let mut iterations = 0;
    let (converged, kkt_gap) = loop {
        let (pair, gap) = problem.select(&a, &g, cfg.tol);
        let Some((i, j)) = pair else {
            break (true, gap);
        };
        if iterations >= max_iter {
            break (false, gap);
        }
        iterations += 1;
        let (old_i, old_j) = (a[i], a[j]);
        problem.update_pair(&mut a, &g, i, j);
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt += problem.q(i, t) * di + problem.q(j, t) * dj;
        }
    };

    let rho = problem.rho(&a, &g);
    let beta: Vec<f64> = (0..n).map(|i| a[i] - a[n + i]).collect();
    let objective = dual_objective(&k, ys, &beta, cfg.epsilon);
    let (support_vectors, dual_coefs) = xs
        .iter()
        .zip(&beta)
        .filter(|(_, b)| **b != 0.0)
        .map(|(x, b)| (x.clone(), *b))
        .unzip();

    Ok(SvrFit {
        model: SvrModel {
            kernel: cfg.kernel,
            support_vectors,
            dual_coefs,
            bias: -rho,
        },
        coefficients: beta,
        objective,
        iterations,
        kkt_gap,
        converged,
    })
}
