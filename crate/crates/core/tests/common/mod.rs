//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use forecast_bench::lstm::{sequence_forward, LstmParams};
use forecast_bench::svr::{kernel_eval, KernelSpec};

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/btc_sample_60.csv")
}

pub fn fixture_text() -> String {
    std::fs::read_to_string(fixture_path()).expect("fixture present")
}

/// Neumaier-compensated sum.
pub fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mse_oracle(a: &[f64], b: &[f64]) -> f64 {
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    neumaier_sum(&sq) / sq.len() as f64
}

pub fn squared_loss(window: &[f64], target: f64, p: &LstmParams) -> f64 {
    let (pred, _) = sequence_forward(window, p).expect("forward pass");
    (pred - target) * (pred - target)
}

/// Central finite-difference gradient over the flattened parameters.
pub fn fd_gradient(window: &[f64], target: f64, p: &LstmParams, step: f64) -> Vec<f64> {
    let base = p.to_flat();
    let mut probe = p.clone();
    let mut flat = base.clone();
    (0..base.len())
        .map(|k| {
            flat[k] = base[k] + step;
            probe.set_flat(&flat).unwrap();
            let up = squared_loss(window, target, &probe);
            flat[k] = base[k] - step;
            probe.set_flat(&flat).unwrap();
            let down = squared_loss(window, target, &probe);
            flat[k] = base[k];
            (up - down) / (2.0 * step)
        })
        .collect()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

pub fn gram(xs: &[Vec<f64>], kernel: &KernelSpec) -> Vec<f64> {
    let n = xs.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = kernel_eval(kernel, &xs[i], &xs[j]).unwrap();
        }
    }
    k
}

/// `½ βᵀKβ + ε Σ|β| − yᵀβ`.
pub fn svr_dual(k: &[f64], y: &[f64], beta: &[f64], eps: f64) -> f64 {
    let n = y.len();
    let mut obj = 0.0;
    for i in 0..n {
        for j in 0..n {
            obj += 0.5 * beta[i] * k[i * n + j] * beta[j];
        }
        obj += eps * beta[i].abs() - y[i] * beta[i];
    }
    obj
}

/// Euclidean projection of `v` onto `{z ∈ [0,c]^{2n} : Σ z_i s_i = 0}` where
/// `s = (+1,…,+1,−1,…,−1)`. Exact: finds the root of the piecewise-linear
/// constraint function over its sorted breakpoints.
fn project(v: &[f64], c: f64) -> Vec<f64> {
    let n = v.len() / 2;
    let sign = |i: usize| if i < n { 1.0 } else { -1.0 };
    let at = |lam: f64| -> (Vec<f64>, f64) {
        let z: Vec<f64> = (0..v.len())
            .map(|i| (v[i] - lam * sign(i)).clamp(0.0, c))
            .collect();
        let g = z.iter().enumerate().map(|(i, zi)| sign(i) * zi).sum();
        (z, g)
    };
    let mut breaks: Vec<f64> = (0..v.len())
        .flat_map(|i| [sign(i) * v[i], sign(i) * (v[i] - c)])
        .collect();
    breaks.sort_by(f64::total_cmp);
    // g is non-increasing in λ; locate the segment containing its root.
    let mut lo = breaks[0] - 1.0;
    let mut hi = breaks[breaks.len() - 1] + 1.0;
    for &b in &breaks {
        let (_, g) = at(b);
        if g > 0.0 {
            lo = lo.max(b);
        } else {
            hi = hi.min(b);
        }
    }
    let (_, g_lo) = at(lo);
    let (_, g_hi) = at(hi);
    let lam = if g_lo == g_hi {
        lo
    } else {
        lo + (hi - lo) * g_lo / (g_lo - g_hi)
    };
    at(lam).0
}

fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-14 {
            return None;
        }
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
        }
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

/// Re-solves the equality-constrained stationarity system on the free set of
/// `beta`, keeping bound variables fixed. Returns `None` if the result leaves
/// the feasible region or changes sign pattern.
fn polish(k: &[f64], y: &[f64], beta: &[f64], eps: f64, c: f64) -> Option<Vec<f64>> {
    let n = y.len();
    let thr = 1e-7 * c;
    let free: Vec<usize> = (0..n)
        .filter(|&i| beta[i].abs() > thr && beta[i].abs() < c - thr)
        .collect();
    let mut fixed = beta.to_vec();
    for i in 0..n {
        if free.contains(&i) {
            continue;
        }
        fixed[i] = if beta[i].abs() <= thr { 0.0 } else { c * beta[i].signum() };
    }
    if free.is_empty() {
        return Some(fixed);
    }
    let m = free.len() + 1;
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    let bound_sum: f64 = (0..n).filter(|i| !free.contains(i)).map(|i| fixed[i]).sum();
    for (r, &i) in free.iter().enumerate() {
        for (s, &j) in free.iter().enumerate() {
            a[r * m + s] = k[i * n + j];
        }
        a[r * m + free.len()] = 1.0;
        a[free.len() * m + r] = 1.0;
        let cross: f64 = (0..n)
            .filter(|j| !free.contains(j))
            .map(|j| k[i * n + j] * fixed[j])
            .sum();
        rhs[r] = y[i] - eps * beta[i].signum() - cross;
    }
    rhs[free.len()] = -bound_sum;
    let sol = solve_dense(a, rhs)?;
    for (r, &i) in free.iter().enumerate() {
        let v = sol[r];
        if v.signum() != beta[i].signum() || v.abs() > c {
            return None;
        }
        fixed[i] = v;
    }
    Some(fixed)
}

/// Minimizes the ε-SVR dual by accelerated projected gradient in the
/// `(α, α*)` variables, then polishes on the detected active set. Returns
/// `(β, objective)`.
pub fn svr_dual_oracle(k: &[f64], y: &[f64], eps: f64, c: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let row_bound = (0..n)
        .map(|i| (0..n).map(|j| k[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / (2.0 * row_bound).max(1e-12);
    let beta_of = |z: &[f64]| -> Vec<f64> { (0..n).map(|i| z[i] - z[n + i]).collect() };
    let obj_of = |z: &[f64]| -> f64 {
        let b = beta_of(z);
        let mut o = svr_dual(k, y, &b, 0.0);
        o += eps * z.iter().sum::<f64>();
        o
    };
    let grad_of = |z: &[f64]| -> Vec<f64> {
        let b = beta_of(z);
        let mut g = vec![0.0; 2 * n];
        for i in 0..n {
            let kb: f64 = (0..n).map(|j| k[i * n + j] * b[j]).sum();
            g[i] = kb + eps - y[i];
            g[n + i] = -kb + eps + y[i];
        }
        g
    };

    let mut z = vec![0.0; 2 * n];
    let mut w = z.clone();
    let mut t = 1.0_f64;
    let mut prev_obj = obj_of(&z);
    for _ in 0..iters {
        let g = grad_of(&w);
        let cand: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
        let next = project(&cand, c);
        let obj = obj_of(&next);
        if obj > prev_obj {
            // Adaptive restart.
            t = 1.0;
            w = z.clone();
            continue;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        w = next
            .iter()
            .zip(&z)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        z = next;
        t = t_next;
        prev_obj = obj;
    }
    let beta = beta_of(&z);
    let obj = svr_dual(k, y, &beta, eps);
    match polish(k, y, &beta, eps, c) {
        Some(p) => {
            let po = svr_dual(k, y, &p, eps);
            if po <= obj {
                (p, po)
            } else {
                (beta, obj)
            }
        }
        None => (beta, obj),
    }
}

/// Largest KKT violation of `(β, b)` for the ε-SVR dual, measured on the
/// residuals `r_i = y_i − f(x_i)`.
pub fn svr_kkt_violation(k: &[f64], y: &[f64], beta: &[f64], bias: f64, eps: f64, c: f64) -> f64 {
    let n = y.len();
    let slack = 1e-9 * c.max(1.0);
    let mut worst = 0.0_f64;
    for i in 0..n {
        let f: f64 = (0..n).map(|j| beta[j] * k[i * n + j]).sum::<f64>() + bias;
        let r = y[i] - f;
        let b = beta[i];
        let v = if b.abs() <= slack {
            (r.abs() - eps).max(0.0)
        } else if b >= c - slack {
            (eps - r).max(0.0)
        } else if b <= -c + slack {
            (r + eps).max(0.0)
        } else if b > 0.0 {
            (r - eps).abs()
        } else {
            (r + eps).abs()
        };
        worst = worst.max(v);
    }
    worst
}
