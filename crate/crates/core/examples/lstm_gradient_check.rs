//! Compares backpropagation-through-time gradients with central finite
//! differences on a small random LSTM, then takes one Adam step.

use forecast_bench::lstm::{bptt_gradients, sequence_forward, AdamConfig, AdamState, LstmParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn loss(window: &[f64], target: f64, p: &LstmParams) -> f64 {
    let (pred, _) = sequence_forward(window, p).expect("valid window");
    (pred - target).powi(2)
}

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut params = LstmParams::init(1, 3, 1.0, &mut rng);
    let window = [0.2, 0.5, 0.1, 0.9];
    let target = 1.3;

    let analytic = bptt_gradients(&window, target, &params)?.to_flat();
    let base = params.to_flat();
    let step = 1e-5;
    let mut worst = 0.0_f64;
    for k in 0..base.len() {
        let mut probe = params.clone();
        let mut flat = base.clone();
        flat[k] += step;
        probe.set_flat(&flat)?;
        let up = loss(&window, target, &probe);
        flat[k] -= 2.0 * step;
        probe.set_flat(&flat)?;
        let down = loss(&window, target, &probe);
        let numeric = (up - down) / (2.0 * step);
        let rel = (analytic[k] - numeric).abs() / (analytic[k].abs() + numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    println!(
        "{} parameters, worst relative gap {worst:.2e}",
        params.num_params()
    );

    let before = loss(&window, target, &params);
    let mut adam = AdamState::for_params(&params, AdamConfig::default());
    let mut flat = params.to_flat();
    adam.step(&mut flat, &analytic)?;
    params.set_flat(&flat)?;
    println!("loss {before:.6} -> {:.6} after one Adam step", loss(&window, target, &params));
    Ok(())
}
