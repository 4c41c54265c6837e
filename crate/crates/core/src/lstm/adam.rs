use serde::{Deserialize, Serialize};

use super::{LstmError, LstmParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Bias-corrected first and second moment estimates over a flat parameter
/// vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub config: AdamConfig,
}

impl AdamState {
    pub fn new(num_params: usize, config: AdamConfig) -> Self {
        Self {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
            config,
        }
    }

    pub fn for_params(p: &LstmParams, config: AdamConfig) -> Self {
        Self::new(p.num_params(), config)
    }

    /// One update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), LstmError> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(LstmError::ShapeMismatch(format!(
                "adam state has {} slots, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        self.t += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Applies one Adam update to every LSTM parameter.
pub fn adam_step(
    params: &mut LstmParams,
    grads: &LstmParams,
    state: &mut AdamState,
) -> Result<(), LstmError> {
    if !params.same_shape(grads) {
        return Err(LstmError::ShapeMismatch(
            "gradient shape differs from parameters".into(),
        ));
    }
    let mut flat = params.to_flat();
    state.step(&mut flat, &grads.to_flat())?;
    params.set_flat(&flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut s = AdamState::new(3, AdamConfig::default());
        let mut p = vec![0.5, -1.0, 2.0];
        s.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, vec![0.5, -1.0, 2.0]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_unit_gradient() {
        let mut s = AdamState::new(1, AdamConfig::default());
        let mut p = vec![0.0];
        s.step(&mut p, &[1.0]).unwrap();
        let expected = -0.001 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-12);
        assert!((p[0] + 0.000999999990).abs() < 1e-14);
    }

    #[test]
    fn first_step_bias_correction_recovers_gradient() {
        let cfg = AdamConfig::default();
        for g in [3.5, -0.002, 1e4] {
            let mut s = AdamState::new(1, cfg);
            s.step(&mut [0.0], &[g]).unwrap();
            let m_hat = s.m[0] / (1.0 - cfg.beta1);
            assert!((m_hat - g).abs() <= 1e-15 * g.abs().max(1.0));
        }
    }

    #[test]
    fn negated_gradient_negates_delta() {
        let g = [0.3, -2.0, 1e-5, 7.0];
        let mut a = AdamState::new(4, AdamConfig::default());
        let mut b = AdamState::new(4, AdamConfig::default());
        let mut pa = vec![0.0; 4];
        let mut pb = vec![0.0; 4];
        for _ in 0..3 {
            a.step(&mut pa, &g).unwrap();
            b.step(&mut pb, &g.map(|x| -x)).unwrap();
        }
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn second_moment_non_negative() {
        let mut s = AdamState::new(2, AdamConfig::default());
        let mut p = vec![1.0, 1.0];
        for k in 0..10 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s.step(&mut p, &[sign * 0.5, -sign * 3.0]).unwrap();
            assert!(s.v.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut s = AdamState::new(2, AdamConfig::default());
        assert!(s.step(&mut [0.0; 3], &[0.0; 3]).is_err());
    }
}
