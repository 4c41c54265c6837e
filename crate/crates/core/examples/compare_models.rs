//! Ranks model results the way the comparison report does, using published
//! MSE values as input.

use forecast_bench::dataset::ScalerParams;
use forecast_bench::eval::{compare, mse_both_scales, ModelResult};

fn main() -> anyhow::Result<()> {
    let report = compare(
        vec![
            ModelResult::new("Long Short Term Memory", 97.91950725856172, 97.91950725856172, "epochs=100"),
            ModelResult::new("Support Vector Machine", 0.02, 0.02, "kernel=linear c=1000"),
            ModelResult::new("Polynomial Regression", 51702001.51, 51702001.51, "degree=2"),
        ],
        "published",
    )?;
    print!("{}", report.to_text());

    // Normalized predictions scored in both units.
    let scaler = ScalerParams::new(7_000.0, 11_000.0)?;
    let actual = [0.91, 0.95, 1.02];
    let predicted = [0.90, 0.97, 0.99];
    let (norm, raw) = mse_both_scales(&actual, &predicted, &scaler)?;
    println!("\nnormalized MSE {norm:.6}, price MSE {raw:.1} (= {:.0}^2 x normalized)", scaler.span());
    Ok(())
}
