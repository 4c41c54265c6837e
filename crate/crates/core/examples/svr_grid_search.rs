//! Kernel x gamma x C grid search with 5-fold CV on the bundled sample,
//! followed by a refit of the best cell.

use forecast_bench::config::RunConfig;
use forecast_bench::eval::mse;
use forecast_bench::pipeline::prepare_data;
use forecast_bench::svr::{self, GridSpec};

fn main() -> anyhow::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/btc_sample_60.csv"))?;
    let data = prepare_data(&text, &RunConfig::default())?;
    let b = data.boundary();
    let t = |i: usize| vec![i as f64 / (b - 1) as f64];
    let train_x: Vec<Vec<f64>> = (0..b).map(t).collect();
    let test_x: Vec<Vec<f64>> = (b..data.normalized.len()).map(t).collect();

    let spec = GridSpec::default();
    let grid = svr::grid_search(&train_x, &data.normalized[..b], &spec)?;
    println!("kernel   gamma      C  cv MSE");
    for cell in &grid.cells {
        println!(
            "{:<7} {:>6} {:>6}  {:.6}",
            cell.kernel.name(),
            cell.gamma,
            cell.c,
            cell.cv_mse
        );
    }

    let best = grid.best_cell();
    let cfg = spec.config_for(best.kernel, best.gamma, best.c);
    let fit = svr::fit(&train_x, &data.normalized[..b], &cfg)?;
    let pred = fit.model.predict_many(&test_x)?;
    println!(
        "best: {} gamma={} C={}, {} support vectors, test MSE {:.6}",
        best.kernel,
        best.gamma,
        best.c,
        fit.model.support_vectors.len(),
        mse(data.test_targets(), &pred)?
    );
    Ok(())
}
