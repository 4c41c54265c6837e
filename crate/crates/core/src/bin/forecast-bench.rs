use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forecast_bench::config::RunConfig;
use forecast_bench::pipeline::{self, ModelKind, PipelineError};

#[derive(Parser)]
#[command(name = "forecast-bench", version, about = "Price forecasting benchmark: LSTM, SVR and polynomial regression")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// OHLCV CSV to prepare.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Directory for all artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Clean, split and normalize the input CSV.
    Prepare,
    /// Run one model family's sweep on the prepared data.
    Run {
        #[arg(value_parser = parse_model)]
        model: ModelKind,
    },
    /// Rank stored model results and write the report.
    Compare {
        /// Comma-separated subset of lstm, svr, poly.
        #[arg(long, value_delimiter = ',', value_parser = parse_model)]
        models: Vec<ModelKind>,
        /// Allow some of the requested models to be missing.
        #[arg(long)]
        subset_ok: bool,
    },
    /// Download a CSV over HTTP to the --input path.
    #[cfg(feature = "fetch")]
    Fetch {
        #[arg(long)]
        url: String,
    },
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

fn load_config(common: &Common) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &common.input {
        cfg.input = Some(p.clone());
    }
    if let Some(p) = &common.out_dir {
        cfg.out_dir = p.clone();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

#[cfg(feature = "fetch")]
fn fetch(cfg: &RunConfig, url: &str) -> anyhow::Result<()> {
    use anyhow::Context;

    let dest = cfg.input.as_deref().context("fetch needs --input as the destination")?;
    let body = ureq::get(url)
        .call()
        .with_context(|| format!("GET {url}"))?
        .body_mut()
        .read_to_string()
        .context("reading response body")?;
    std::fs::write(dest, body).with_context(|| format!("writing {}", dest.display()))?;
    println!("saved {url} to {}", dest.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), PipelineError> {
    let cfg = load_config(&cli.common).map_err(|e| PipelineError::Prepare(format!("{e:#}")))?;
    match cli.command {
        Command::Prepare => {
            let p = pipeline::cmd_prepare(&cfg)?;
            let b = p.boundary();
            println!(
                "{} records ({} dropped): {} train, {} test",
                p.meta.records,
                p.meta.records_dropped,
                b,
                p.meta.records - b
            );
        }
        Command::Run { model } => {
            let run = pipeline::cmd_run(&cfg, model)?;
            println!(
                "{}: test MSE {} (normalized), {} (raw) [{}]",
                run.result.model_name,
                run.result.mse_normalized,
                run.result.mse_raw,
                run.result.config_summary
            );
        }
        Command::Compare { models, subset_ok } => {
            let models = if models.is_empty() {
                ModelKind::ALL.to_vec()
            } else {
                models
            };
            let report = pipeline::cmd_compare(&cfg, &models, subset_ok)?;
            print!("{}", report.to_text());
        }
        #[cfg(feature = "fetch")]
        Command::Fetch { url } => {
            fetch(&cfg, &url).map_err(|e| PipelineError::Prepare(format!("{e:#}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
