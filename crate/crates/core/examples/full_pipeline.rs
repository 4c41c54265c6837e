//! Runs prepare, every model and compare on the bundled sample, writing all
//! artifacts to a directory (default `target/forecast-bench-demo`).
//!
//! ```sh
//! cargo run --release --example full_pipeline [out-dir]
//! ```

use forecast_bench::config::RunConfig;
use forecast_bench::pipeline::{cmd_compare, cmd_prepare, cmd_run, ModelKind};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "target/forecast-bench-demo".into());
    let cfg = RunConfig {
        input: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/data/btc_sample_60.csv").into()),
        out_dir: out.clone().into(),
        ..RunConfig::default()
    };

    let prepared = cmd_prepare(&cfg)?;
    println!("prepared {} records, config {}", prepared.meta.records, cfg.config_hash());
    for model in ModelKind::ALL {
        let run = cmd_run(&cfg, model)?;
        println!("{:<24} {}", run.result.model_name, run.result.config_summary);
    }
    let report = cmd_compare(&cfg, &ModelKind::ALL, false)?;
    println!();
    print!("{}", report.to_text());
    println!("artifacts in {out}");
    Ok(())
}
