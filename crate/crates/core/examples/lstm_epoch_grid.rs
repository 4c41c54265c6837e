//! Trains the LSTM on the bundled sample once per epoch count and prints the
//! test MSE table.

use forecast_bench::config::RunConfig;
use forecast_bench::dataset::make_windows;
use forecast_bench::lstm::epoch_grid;
use forecast_bench::pipeline::prepare_data;

fn main() -> anyhow::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/btc_sample_60.csv"))?;
    let cfg = RunConfig::default();
    let data = prepare_data(&text, &cfg)?;
    let boundary = data.boundary();

    let windows = make_windows(&data.normalized, cfg.data.window)?;
    let train = windows.filter_by_target_index(|i| i < boundary);
    let test = windows.filter_by_target_index(|i| i >= boundary);
    println!("{} train / {} test windows", train.len(), test.len());

    let runs = epoch_grid(&train, &test, &cfg.lstm.epochs, cfg.seed, &cfg.lstm.model_config());
    println!("epoch  test MSE (normalized)");
    for run in runs {
        let run = run?;
        let last = run.final_record();
        println!("{:>5}  {:.6}", run.epochs, last.test_mse);
    }
    Ok(())
}
