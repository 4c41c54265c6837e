use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LstmError;

/// Weights of one gate: `x_t · wx + h_{t-1} · wh + b`.
///
/// `wx` is `D x H` and `wh` is `H x H`, both row-major, so the pre-activation
/// of unit `j` is `sum_d x[d] * wx[d * H + j] + sum_k h[k] * wh[k * H + j] + b[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub wx: Vec<f64>,
    pub wh: Vec<f64>,
    pub b: Vec<f64>,
}

impl GateParams {
    fn zeros(input_size: usize, hidden_size: usize) -> Self {
        Self {
            wx: vec![0.0; input_size * hidden_size],
            wh: vec![0.0; hidden_size * hidden_size],
            b: vec![0.0; hidden_size],
        }
    }

    /// Pre-activation for row vectors `x` (len D) and `h` (len H).
    pub(crate) fn preactivation(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let hidden = self.b.len();
        let mut out = self.b.clone();
        for (d, xd) in x.iter().enumerate() {
            if *xd == 0.0 {
                continue;
            }
            let row = &self.wx[d * hidden..(d + 1) * hidden];
            for (o, w) in out.iter_mut().zip(row) {
                *o += xd * w;
            }
        }
        for (k, hk) in h.iter().enumerate() {
            if *hk == 0.0 {
                continue;
            }
            let row = &self.wh[k * hidden..(k + 1) * hidden];
            for (o, w) in out.iter_mut().zip(row) {
                *o += hk * w;
            }
        }
        out
    }
}

/// All trainable parameters of a single-layer LSTM with a linear scalar head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub input_size: usize,
    pub hidden_size: usize,
    pub input_gate: GateParams,
    pub forget_gate: GateParams,
    pub candidate: GateParams,
    pub output_gate: GateParams,
    /// Output head weights `w_y` (len H).
    pub head_w: Vec<f64>,
    /// Output head bias `b_y`.
    pub head_b: f64,
}

impl LstmParams {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        Self {
            input_size,
            hidden_size,
            input_gate: GateParams::zeros(input_size, hidden_size),
            forget_gate: GateParams::zeros(input_size, hidden_size),
            candidate: GateParams::zeros(input_size, hidden_size),
            output_gate: GateParams::zeros(input_size, hidden_size),
            head_w: vec![0.0; hidden_size],
            head_b: 0.0,
        }
    }

    /// Uniform(-k, k) with `k = 1/sqrt(H)` for every weight and bias, then the
    /// forget-gate bias is overwritten with `forget_bias`.
    pub fn init<R: Rng + ?Sized>(
        input_size: usize,
        hidden_size: usize,
        forget_bias: f64,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zeros(input_size, hidden_size);
        let k = 1.0 / (hidden_size as f64).sqrt();
        for tensor in p.tensors_mut() {
            for v in tensor.iter_mut() {
                *v = rng.random_range(-k..k);
            }
        }
        p.forget_gate.b.iter_mut().for_each(|b| *b = forget_bias);
        p
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.input_size, self.hidden_size)
    }

    /// Parameter tensors in a fixed order: for each gate (input, forget,
    /// candidate, output) `wx, wh, b`; then the head weights and head bias.
    pub fn tensors(&self) -> [&[f64]; 14] {
        let g = [
            &self.input_gate,
            &self.forget_gate,
            &self.candidate,
            &self.output_gate,
        ];
        [
            &g[0].wx,
            &g[0].wh,
            &g[0].b,
            &g[1].wx,
            &g[1].wh,
            &g[1].b,
            &g[2].wx,
            &g[2].wh,
            &g[2].b,
            &g[3].wx,
            &g[3].wh,
            &g[3].b,
            &self.head_w,
            std::slice::from_ref(&self.head_b),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 14] {
        let [i, f, c, o] = [
            &mut self.input_gate,
            &mut self.forget_gate,
            &mut self.candidate,
            &mut self.output_gate,
        ];
        [
            &mut i.wx,
            &mut i.wh,
            &mut i.b,
            &mut f.wx,
            &mut f.wh,
            &mut f.b,
            &mut c.wx,
            &mut c.wh,
            &mut c.b,
            &mut o.wx,
            &mut o.wh,
            &mut o.b,
            &mut self.head_w,
            std::slice::from_mut(&mut self.head_b),
        ]
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Flattened copy in [`tensors`](Self::tensors) order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<(), LstmError> {
        if flat.len() != self.num_params() {
            return Err(LstmError::ShapeMismatch(format!(
                "flat vector has {} entries, model has {}",
                flat.len(),
                self.num_params()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[offset..offset + t.len()]);
            offset += t.len();
        }
        Ok(())
    }

    /// `self += scale * other`, elementwise.
    pub fn add_scaled(&mut self, other: &LstmParams, scale: f64) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn same_shape(&self, other: &LstmParams) -> bool {
        self.input_size == other.input_size && self.hidden_size == other.hidden_size
    }

    pub(crate) fn check_shapes(&self) -> Result<(), LstmError> {
        let (d, h) = (self.input_size, self.hidden_size);
        let gates = [
            &self.input_gate,
            &self.forget_gate,
            &self.candidate,
            &self.output_gate,
        ];
        let ok = h > 0
            && d > 0
            && gates
                .iter()
                .all(|g| g.wx.len() == d * h && g.wh.len() == h * h && g.b.len() == h)
            && self.head_w.len() == h;
        if ok {
            Ok(())
        } else {
            Err(LstmError::ShapeMismatch(format!(
                "parameter tensors inconsistent with D={d}, H={h}"
            )))
        }
    }
}
