//! Parse, clean, split and normalize the bundled price sample, then cut
//! sliding windows.
//!
//! ```sh
//! cargo run --example prepare_dataset [path/to/prices.csv]
//! ```

use forecast_bench::dataset::{self, make_windows, PriceColumn};

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/btc_sample_60.csv").to_string()
    });
    let text = std::fs::read_to_string(&path)?;

    let parsed = dataset::parse_csv(&text)?;
    let series = dataset::clean(&parsed)?;
    println!(
        "{path}: {} rows, {} complete",
        parsed.len(),
        series.len()
    );

    let (train, test) = dataset::chronological_split(&series, 0.8)?;
    let close = series.column(PriceColumn::Close)?;
    let scaler = dataset::fit_scaler(&close[..train.len()])?;
    println!(
        "train {} rows, test {} rows, close range [{:.2}, {:.2}]",
        train.len(),
        test.len(),
        scaler.min(),
        scaler.max()
    );

    let normalized = scaler.scale(&close);
    for (d, v) in series.dates().iter().zip(&normalized).skip(train.len()).take(3) {
        println!("  {d}  {v:.4}");
    }

    let windows = make_windows(&normalized, 30)?;
    let test_windows = windows.filter_by_target_index(|i| i >= train.len());
    println!(
        "{} windows of 30 days, {} with a test-period target",
        windows.len(),
        test_windows.len()
    );
    Ok(())
}
