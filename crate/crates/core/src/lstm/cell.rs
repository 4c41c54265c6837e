//! Forward pass of the LSTM cell, sequence unrolling, and reverse-mode
//! gradients through time.

use serde::{Deserialize, Serialize};

use super::{LstmError, LstmParams};

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Hidden and cell state carried between time steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            h: vec![0.0; hidden_size],
            c: vec![0.0; hidden_size],
        }
    }
}

/// Activations of one step, kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub input: Vec<f64>,
    pub forget: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output: Vec<f64>,
    pub cell: Vec<f64>,
    /// `tanh(cell)`
    pub cell_tanh: Vec<f64>,
}

/// One application of the cell:
///
/// ```text
/// i = σ(x·W_ix + h·W_ih + b_i)    f = σ(x·W_fx + h·W_fh + b_f)
/// c̃ = tanh(x·W_cx + h·W_ch + b_c)  o = σ(x·W_ox + h·W_oh + b_o)
/// C' = f∘C + i∘c̃                   h' = o∘tanh(C')
/// ```
pub fn cell_forward(
    x: &[f64],
    state: &LstmState,
    p: &LstmParams,
) -> Result<(LstmState, StepCache), LstmError> {
    p.check_shapes()?;
    if x.len() != p.input_size || state.h.len() != p.hidden_size || state.c.len() != p.hidden_size
    {
        return Err(LstmError::ShapeMismatch(format!(
            "x has {} features, state has ({}, {}); model expects D={}, H={}",
            x.len(),
            state.h.len(),
            state.c.len(),
            p.input_size,
            p.hidden_size
        )));
    }
    Ok(step(x, state, p))
}

fn step(x: &[f64], state: &LstmState, p: &LstmParams) -> (LstmState, StepCache) {
    let input: Vec<f64> = p
        .input_gate
        .preactivation(x, &state.h)
        .into_iter()
        .map(sigmoid)
        .collect();
    let forget: Vec<f64> = p
        .forget_gate
        .preactivation(x, &state.h)
        .into_iter()
        .map(sigmoid)
        .collect();
    let candidate: Vec<f64> = p
        .candidate
        .preactivation(x, &state.h)
        .into_iter()
        .map(f64::tanh)
        .collect();
    let output: Vec<f64> = p
        .output_gate
        .preactivation(x, &state.h)
        .into_iter()
        .map(sigmoid)
        .collect();

    let cell: Vec<f64> = (0..p.hidden_size)
        .map(|j| forget[j] * state.c[j] + input[j] * candidate[j])
        .collect();
    let cell_tanh: Vec<f64> = cell.iter().map(|c| c.tanh()).collect();
    let h: Vec<f64> = output.iter().zip(&cell_tanh).map(|(o, t)| o * t).collect();

    let cache = StepCache {
        x: x.to_vec(),
        h_prev: state.h.clone(),
        c_prev: state.c.clone(),
        input,
        forget,
        candidate,
        output,
        cell: cell.clone(),
        cell_tanh,
    };
    (LstmState { h, c: cell }, cache)
}

/// Caches of an unrolled sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceCache {
    pub steps: Vec<StepCache>,
    pub final_state: LstmState,
}

/// Unrolls the cell over `window` from a zero state and applies the head
/// `h_T · w_y + b_y`.
///
/// The window is read as `T = window.len() / D` consecutive steps of `D`
/// features; for the usual scalar price series `D = 1`.
pub fn sequence_forward(
    window: &[f64],
    p: &LstmParams,
) -> Result<(f64, SequenceCache), LstmError> {
    p.check_shapes()?;
    if window.is_empty() {
        return Err(LstmError::EmptyWindow);
    }
    if window.len() % p.input_size != 0 {
        return Err(LstmError::ShapeMismatch(format!(
            "window of {} values is not a whole number of {}-feature steps",
            window.len(),
            p.input_size
        )));
    }
    Ok(unroll(window, p))
}

fn unroll(window: &[f64], p: &LstmParams) -> (f64, SequenceCache) {
    let mut state = LstmState::zeros(p.hidden_size);
    let mut steps = Vec::with_capacity(window.len() / p.input_size);
    for x in window.chunks_exact(p.input_size) {
        let (next, cache) = step(x, &state, p);
        steps.push(cache);
        state = next;
    }
    let prediction = head(&state.h, p);
    (
        prediction,
        SequenceCache {
            steps,
            final_state: state,
        },
    )
}

fn head(h: &[f64], p: &LstmParams) -> f64 {
    h.iter().zip(&p.head_w).map(|(a, b)| a * b).sum::<f64>() + p.head_b
}

/// Prediction only, skipping validation; used on hot paths after shapes are known.
pub(crate) fn predict_unchecked(window: &[f64], p: &LstmParams) -> f64 {
    let mut state = LstmState::zeros(p.hidden_size);
    for x in window.chunks_exact(p.input_size) {
        state = step(x, &state, p).0;
    }
    head(&state.h, p)
}

/// Exact gradient of `(prediction - target)^2` with respect to every parameter.
pub fn bptt_gradients(
    window: &[f64],
    target: f64,
    p: &LstmParams,
) -> Result<LstmParams, LstmError> {
    let (prediction, cache) = sequence_forward(window, p)?;
    let mut grads = p.zeros_like();
    backward(&cache, prediction, target, p, &mut grads, 1.0);
    Ok(grads)
}

/// Accumulates `scale * d/dθ (prediction - target)^2` into `grads` and
/// returns the prediction.
pub(crate) fn accumulate_gradients(
    window: &[f64],
    target: f64,
    p: &LstmParams,
    grads: &mut LstmParams,
    scale: f64,
) -> f64 {
    let (prediction, cache) = unroll(window, p);
    backward(&cache, prediction, target, p, grads, scale);
    prediction
}

fn backward(
    cache: &SequenceCache,
    prediction: f64,
    target: f64,
    p: &LstmParams,
    grads: &mut LstmParams,
    scale: f64,
) {
    let hidden = p.hidden_size;
    let d_pred = scale * 2.0 * (prediction - target);
    if d_pred == 0.0 {
        return;
    }

    grads.head_b += d_pred;
    for (g, h) in grads.head_w.iter_mut().zip(&cache.final_state.h) {
        *g += d_pred * h;
    }

    let mut dh: Vec<f64> = p.head_w.iter().map(|w| d_pred * w).collect();
    let mut dc = vec![0.0; hidden];
    let mut da = [
        vec![0.0; hidden],
        vec![0.0; hidden],
        vec![0.0; hidden],
        vec![0.0; hidden],
    ];

    for s in cache.steps.iter().rev() {
        for j in 0..hidden {
            let t = s.cell_tanh[j];
            let d_out = dh[j] * t;
            dc[j] += dh[j] * s.output[j] * (1.0 - t * t);

            let d_in = dc[j] * s.candidate[j];
            let d_cand = dc[j] * s.input[j];
            let d_forget = dc[j] * s.c_prev[j];

            da[0][j] = d_in * s.input[j] * (1.0 - s.input[j]);
            da[1][j] = d_forget * s.forget[j] * (1.0 - s.forget[j]);
            da[2][j] = d_cand * (1.0 - s.candidate[j] * s.candidate[j]);
            da[3][j] = d_out * s.output[j] * (1.0 - s.output[j]);

            // carry to C_{t-1}
            dc[j] *= s.forget[j];
        }

        let mut dh_prev = vec![0.0; hidden];
        let gate_pairs = [
            (&p.input_gate, &mut grads.input_gate),
            (&p.forget_gate, &mut grads.forget_gate),
            (&p.candidate, &mut grads.candidate),
            (&p.output_gate, &mut grads.output_gate),
        ];
        for ((gate, grad), da) in gate_pairs.into_iter().zip(&da) {
            for (d, xd) in s.x.iter().enumerate() {
                let row = &mut grad.wx[d * hidden..(d + 1) * hidden];
                for (g, a) in row.iter_mut().zip(da) {
                    *g += xd * a;
                }
            }
            for (k, hk) in s.h_prev.iter().enumerate() {
                let w_row = &gate.wh[k * hidden..(k + 1) * hidden];
                let g_row = &mut grad.wh[k * hidden..(k + 1) * hidden];
                let mut acc = 0.0;
                for j in 0..hidden {
                    g_row[j] += hk * da[j];
                    acc += w_row[j] * da[j];
                }
                dh_prev[k] += acc;
            }
            for (g, a) in grad.b.iter_mut().zip(da) {
                *g += a;
            }
        }
        dh = dh_prev;
    }
}
