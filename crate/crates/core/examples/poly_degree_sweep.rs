//! Polynomial fits of the normalized close against the day index for the
//! degrees 2, 4, 6, 9 and 11.

use forecast_bench::config::RunConfig;
use forecast_bench::pipeline::prepare_data;
use forecast_bench::polyreg::{degree_sweep, CurveData};

fn main() -> anyhow::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/btc_sample_60.csv"))?;
    let data = prepare_data(&text, &RunConfig::default())?;
    let b = data.boundary();
    let idx: Vec<f64> = (0..data.normalized.len()).map(|i| i as f64).collect();
    let train = CurveData {
        x: idx[..b].to_vec(),
        y: data.normalized[..b].to_vec(),
    };
    let test = CurveData {
        x: idx[b..].to_vec(),
        y: data.normalized[b..].to_vec(),
    };

    let sweep = degree_sweep(&train, &test, &[2, 4, 6, 9, 11])?;
    println!("degree  train MSE   test MSE");
    for row in &sweep.rows {
        println!("{:>6}  {:.6}  {:>10.6}", row.degree, row.train_mse, row.test_mse);
    }
    let best = sweep.best_row();
    println!(
        "best degree {}: intercept {:.4}, a_1 {:.4}",
        best.degree, best.model.intercept, best.model.coefficients[0]
    );
    Ok(())
}
