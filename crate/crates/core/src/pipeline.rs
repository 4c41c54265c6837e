//! The `prepare` / `run` / `compare` stages and their on-disk artifacts.
//!
//! All artifacts live in the configured output directory:
//!
//! | stage   | files |
//! |---------|-------|
//! | prepare | `prepared.csv` (`index,date,normalized_close`), `prepared_meta.json` |
//! | lstm    | `lstm_epochs.csv` (`epoch,mse`), `lstm_history_<E>.csv`, `lstm_model.json`, `lstm_result.json` |
//! | svr     | `svr_grid.csv` (`kernel,gamma,c,mse`), `svr_best.json`, `svr_model.json`, `svr_result.json` |
//! | poly    | `poly_degrees.csv` (`degree,mse`), `poly_model.json`, `poly_result.json` |
//! | compare | `report.txt`, `report.json`, `report.csv` (`model,mse_normalized,mse_raw`), `predictions_<model>.csv` |
//!
//! CSV files open with a `# forecast-bench config_hash=... seed=...` comment
//! line; JSON files carry the same two fields. Nothing time-dependent is
//! written, so reruns with the same config produce identical bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{FeatureMode, RunConfig};
use crate::dataset::{self, make_windows, DatasetError, PriceColumn, ScalerParams, WindowedDataset};
use crate::eval::{self, mse_both_scales, EvalReport, ModelResult};
use crate::lstm::{self, LstmCheckpoint};
use crate::polyreg::{self, CurveData};
use crate::svr::{self, SvrModelFile};

pub const PREPARED_CSV: &str = "prepared.csv";
pub const PREPARED_META: &str = "prepared_meta.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Prepare(String),
    #[error("{model}: {message}")]
    Model { model: ModelKind, message: String },
    #[error("missing results: {0}")]
    MissingResults(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Prepare(_) | PipelineError::Io { .. } => 2,
            PipelineError::Model { .. } => 3,
            PipelineError::MissingResults(_) => 4,
        }
    }

    fn model(model: ModelKind, err: impl fmt::Display) -> Self {
        PipelineError::Model {
            model,
            message: err.to_string(),
        }
    }
}

impl From<DatasetError> for PipelineError {
    fn from(e: DatasetError) -> Self {
        PipelineError::Prepare(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lstm,
    Svr,
    Poly,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Lstm, ModelKind::Svr, ModelKind::Poly];

    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Svr => "svr",
            ModelKind::Poly => "poly",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Lstm => "Long Short Term Memory",
            ModelKind::Svr => "Support Vector Machine",
            ModelKind::Poly => "Polynomial Regression",
        }
    }

    fn result_file(self) -> String {
        format!("{}_result.json", self.slug())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lstm" => Ok(ModelKind::Lstm),
            "svr" | "svm" => Ok(ModelKind::Svr),
            "poly" | "polyreg" | "polynomial" => Ok(ModelKind::Poly),
            other => Err(format!("unknown model `{other}` (expected lstm, svr or poly)")),
        }
    }
}

fn stamp(config: &RunConfig) -> String {
    format!(
        "# forecast-bench config_hash={} seed={}\n",
        config.config_hash(),
        config.seed
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    write_file(path, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })
}

fn ensure_out_dir(config: &RunConfig) -> Result<&Path, PipelineError> {
    let dir = config.out_dir.as_path();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir)
}

/// Sidecar of the prepared dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedMeta {
    pub config_hash: String,
    pub seed: u64,
    pub target_column: PriceColumn,
    pub train_fraction: f64,
    pub records: usize,
    pub records_dropped: usize,
    /// Index of the first test record.
    pub split_boundary: usize,
    pub scaler: ScalerParams,
    pub source_sha256: String,
    /// Hash of the input bytes and the split boundary.
    pub fingerprint: String,
}

/// Normalized target series with its metadata, as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub dates: Vec<NaiveDate>,
    pub normalized: Vec<f64>,
    pub meta: PreparedMeta,
}

impl PreparedData {
    pub fn boundary(&self) -> usize {
        self.meta.split_boundary
    }

    pub fn test_dates(&self) -> &[NaiveDate] {
        &self.dates[self.boundary()..]
    }

    pub fn test_targets(&self) -> &[f64] {
        &self.normalized[self.boundary()..]
    }
}

fn fingerprint(source_sha: &str, boundary: usize) -> String {
    let digest = Sha256::digest(format!("{source_sha}:{boundary}").as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses, cleans, splits and normalizes in memory.
pub fn prepare_data(text: &str, config: &RunConfig) -> Result<PreparedData, PipelineError> {
    let parsed = dataset::parse_csv(text)?;
    let cleaned = dataset::clean(&parsed)?;
    let dropped = parsed.len() - cleaned.len();
    if dropped > 0 {
        warn!("dropped {dropped} record(s) with missing fields");
    }
    let boundary = dataset::split_boundary(cleaned.len(), config.data.train_fraction)?;
    let values = cleaned.column(config.data.target_column)?;
    let scaler = dataset::fit_scaler(&values[..boundary])?;
    let source_sha: String = Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok(PreparedData {
        dates: cleaned.dates(),
        normalized: scaler.scale(&values),
        meta: PreparedMeta {
            config_hash: config.config_hash(),
            seed: config.seed,
            target_column: config.data.target_column,
            train_fraction: config.data.train_fraction,
            records: cleaned.len(),
            records_dropped: dropped,
            split_boundary: boundary,
            scaler,
            fingerprint: fingerprint(&source_sha, boundary),
            source_sha256: source_sha,
        },
    })
}

/// `prepare`: reads the input CSV and writes the normalized dataset and its
/// metadata.
pub fn cmd_prepare(config: &RunConfig) -> Result<PreparedData, PipelineError> {
    let input = config
        .input
        .as_deref()
        .ok_or_else(|| PipelineError::Prepare("no input file given (use --input)".into()))?;
    let text = fs::read_to_string(input)
        .map_err(|e| PipelineError::Prepare(format!("cannot read {}: {e}", input.display())))?;
    let prepared = prepare_data(&text, config)
        .map_err(|e| PipelineError::Prepare(format!("{}: {e}", input.display())))?;
    let dir = ensure_out_dir(config)?;

    let mut csv = stamp(config);
    csv.push_str("index,date,normalized_close\n");
    for (i, (d, v)) in prepared.dates.iter().zip(&prepared.normalized).enumerate() {
        csv.push_str(&format!("{i},{d},{v}\n"));
    }
    write_file(&dir.join(PREPARED_CSV), &csv)?;
    write_json(&dir.join(PREPARED_META), &prepared.meta)?;
    info!(
        "prepared {} records ({} train / {} test, {} dropped)",
        prepared.meta.records,
        prepared.boundary(),
        prepared.meta.records - prepared.boundary(),
        prepared.meta.records_dropped
    );
    Ok(prepared)
}

/// Reads `prepared.csv` and its sidecar from the output directory.
pub fn load_prepared(out_dir: &Path) -> Result<PreparedData, PipelineError> {
    let meta: PreparedMeta = read_json(&out_dir.join(PREPARED_META))?;
    let path = out_dir.join(PREPARED_CSV);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let bad = |m: String| PipelineError::Io {
        path: path.clone(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, m),
    };
    let mut dates = Vec::new();
    let mut normalized = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let mut parts = line.split(',');
        let (_, date, value) = (parts.next(), parts.next(), parts.next());
        let date = date
            .and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
            .ok_or_else(|| bad(format!("bad row `{line}`")))?;
        let value: f64 = value
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("bad row `{line}`")))?;
        dates.push(date);
        normalized.push(value);
    }
    if normalized.len() != meta.records {
        return Err(bad(format!(
            "{} rows but metadata records {}",
            normalized.len(),
            meta.records
        )));
    }
    Ok(PreparedData {
        dates,
        normalized,
        meta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub date: NaiveDate,
    pub actual: f64,
    pub predicted: f64,
}

/// What `run` leaves behind for `compare`: the score, the winning settings
/// and the test-set predictions in normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub config_hash: String,
    pub seed: u64,
    pub model: ModelKind,
    pub result: ModelResult,
    pub scaler: ScalerParams,
    pub fingerprint: String,
    pub predictions: Vec<PredictionRow>,
}

fn model_run(
    config: &RunConfig,
    data: &PreparedData,
    model: ModelKind,
    predicted: Vec<f64>,
    summary: String,
) -> Result<ModelRun, PipelineError> {
    let actual = data.test_targets();
    let (mse_normalized, mse_raw) = mse_both_scales(actual, &predicted, &data.meta.scaler)
        .map_err(|e| PipelineError::model(model, e))?;
    let predictions = data
        .test_dates()
        .iter()
        .zip(actual)
        .zip(&predicted)
        .map(|((d, a), p)| PredictionRow {
            date: *d,
            actual: *a,
            predicted: *p,
        })
        .collect();
    Ok(ModelRun {
        config_hash: config.config_hash(),
        seed: config.seed,
        model,
        result: ModelResult::new(model.display_name(), mse_normalized, mse_raw, summary),
        scaler: data.meta.scaler,
        fingerprint: data.meta.fingerprint.clone(),
        predictions,
    })
}

/// Windows over the whole series, split by whether the target falls before
/// the boundary. Test windows may look back into the training period.
fn split_windows(
    data: &PreparedData,
    window: usize,
    model: ModelKind,
) -> Result<(WindowedDataset, WindowedDataset), PipelineError> {
    let boundary = data.boundary();
    if boundary <= window {
        return Err(PipelineError::model(
            model,
            format!("training split of {boundary} records is too short for window {window}"),
        ));
    }
    let all = make_windows(&data.normalized, window).map_err(|e| PipelineError::model(model, e))?;
    Ok((
        all.filter_by_target_index(|i| i < boundary),
        all.filter_by_target_index(|i| i >= boundary),
    ))
}

/// `run lstm`: one training run per epoch count.
pub fn run_lstm(config: &RunConfig, data: &PreparedData) -> Result<ModelRun, PipelineError> {
    let kind = ModelKind::Lstm;
    let dir = ensure_out_dir(config)?;
    let (train, test) = split_windows(data, config.data.window, kind)?;
    let model_cfg = config.lstm.model_config();
    let runs = lstm::epoch_grid(&train, &test, &config.lstm.epochs, config.seed, &model_cfg);

    let mut table = stamp(config);
    table.push_str("epoch,mse\n");
    let mut ok_runs = Vec::new();
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(run) => {
                let mut hist = stamp(config);
                hist.push_str("epoch,train_mse,test_mse\n");
                for r in &run.history {
                    hist.push_str(&format!("{},{},{}\n", r.epoch, r.train_mse, r.test_mse));
                }
                write_file(&dir.join(format!("lstm_history_{}.csv", run.epochs)), &hist)?;
                table.push_str(&format!("{},{}\n", run.epochs, run.final_record().test_mse));
                ok_runs.push(run);
            }
            Err(e) => first_err = first_err.or(Some(e)),
        }
    }
    write_file(&dir.join("lstm_epochs.csv"), &table)?;
    if let Some(e) = first_err {
        return Err(PipelineError::model(kind, e));
    }

    let best = ok_runs
        .iter()
        .min_by(|a, b| {
            a.final_record()
                .test_mse
                .total_cmp(&b.final_record().test_mse)
                .then(a.epochs.cmp(&b.epochs))
        })
        .ok_or_else(|| PipelineError::model(kind, "no epoch counts configured"))?;
    let ck = LstmCheckpoint::new(
        best.model.clone(),
        model_cfg,
        Some(data.meta.scaler),
        config.seed,
        best.epochs,
        config.data.window,
    );
    write_file(&dir.join("lstm_model.json"), &(ck.to_json() + "\n"))?;

    let predicted = lstm::predict_all(&best.model, &test);
    let run = model_run(config, data, kind, predicted, format!("epochs={}", best.epochs))?;
    write_json(&dir.join(kind.result_file()), &run)?;
    Ok(run)
}

fn time_features(data: &PreparedData) -> Vec<f64> {
    let span = (data.boundary() - 1).max(1) as f64;
    (0..data.normalized.len()).map(|i| i as f64 / span).collect()
}

#[derive(Debug, Serialize)]
struct BestCellRecord<'a> {
    config_hash: String,
    seed: u64,
    kernel: svr::KernelKind,
    gamma: f64,
    c: f64,
    cv_mse: f64,
    epsilon: f64,
    folds: usize,
    refit_converged: bool,
    refit_kkt_gap: f64,
    cell: &'a svr::GridCell,
}

/// `run svr`: grid search on the training split, refit the winner, score on
/// the test split.
pub fn run_svr(config: &RunConfig, data: &PreparedData) -> Result<ModelRun, PipelineError> {
    let kind = ModelKind::Svr;
    let dir = ensure_out_dir(config)?;
    let boundary = data.boundary();
    let (train_x, train_y, test_x): (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) =
        match config.svr.features {
            FeatureMode::Time => {
                let t = time_features(data);
                (
                    t[..boundary].iter().map(|v| vec![*v]).collect(),
                    data.normalized[..boundary].to_vec(),
                    t[boundary..].iter().map(|v| vec![*v]).collect(),
                )
            }
            FeatureMode::Lagged => {
                let (train, test) = split_windows(data, config.data.window, kind)?;
                (train.inputs, train.targets, test.inputs)
            }
        };

    let spec = config.svr.grid_spec();
    let grid = svr::grid_search(&train_x, &train_y, &spec).map_err(|e| PipelineError::model(kind, e))?;
    let mut table = stamp(config);
    table.push_str("kernel,gamma,c,mse\n");
    for cell in &grid.cells {
        table.push_str(&format!("{},{},{},{}\n", cell.kernel, cell.gamma, cell.c, cell.cv_mse));
    }
    write_file(&dir.join("svr_grid.csv"), &table)?;

    let best = grid.best_cell();
    let cfg = spec.config_for(best.kernel, best.gamma, best.c);
    let fitted = svr::fit(&train_x, &train_y, &cfg).map_err(|e| PipelineError::model(kind, e))?;
    if !fitted.converged {
        warn!(
            "svr refit stopped at the iteration cap (KKT gap {})",
            fitted.kkt_gap
        );
    }
    write_json(
        &dir.join("svr_best.json"),
        &BestCellRecord {
            config_hash: config.config_hash(),
            seed: config.seed,
            kernel: best.kernel,
            gamma: best.gamma,
            c: best.c,
            cv_mse: best.cv_mse,
            epsilon: spec.epsilon,
            folds: spec.folds,
            refit_converged: fitted.converged,
            refit_kkt_gap: fitted.kkt_gap,
            cell: best,
        },
    )?;
    let file = SvrModelFile::new(fitted.model.clone(), cfg.c, cfg.epsilon, Some(data.meta.scaler));
    write_file(&dir.join("svr_model.json"), &(file.to_json() + "\n"))?;

    let predicted = fitted
        .model
        .predict_many(&test_x)
        .map_err(|e| PipelineError::model(kind, e))?;
    let summary = format!("kernel={} gamma={} c={}", best.kernel, best.gamma, best.c);
    let run = model_run(config, data, kind, predicted, summary)?;
    write_json(&dir.join(kind.result_file()), &run)?;
    Ok(run)
}

#[derive(Debug, Serialize)]
struct PolyModelRecord<'a> {
    config_hash: String,
    seed: u64,
    features: FeatureMode,
    scaler: ScalerParams,
    model: &'a polyreg::PolyModel,
}

/// `run poly`: degree sweep on the training split, scored on the test split.
pub fn run_poly(config: &RunConfig, data: &PreparedData) -> Result<ModelRun, PipelineError> {
    let kind = ModelKind::Poly;
    let dir = ensure_out_dir(config)?;
    let boundary = data.boundary();
    let y = &data.normalized;
    let (train, test) = match config.poly.features {
        FeatureMode::Time => {
            let idx: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
            (
                CurveData {
                    x: idx[..boundary].to_vec(),
                    y: y[..boundary].to_vec(),
                },
                CurveData {
                    x: idx[boundary..].to_vec(),
                    y: y[boundary..].to_vec(),
                },
            )
        }
        FeatureMode::Lagged => (
            CurveData {
                x: y[..boundary - 1].to_vec(),
                y: y[1..boundary].to_vec(),
            },
            CurveData {
                x: y[boundary - 1..y.len() - 1].to_vec(),
                y: y[boundary..].to_vec(),
            },
        ),
    };

    let rows = polyreg::sweep_rows(&train, &test, &config.poly.degrees);
    let mut table = stamp(config);
    table.push_str("degree,mse\n");
    let mut ok_rows = Vec::new();
    let mut first_err = None;
    for (degree, row) in config.poly.degrees.iter().zip(rows) {
        match row {
            Ok(row) => {
                table.push_str(&format!("{},{}\n", row.degree, row.test_mse));
                ok_rows.push(row);
            }
            Err(e) => first_err = first_err.or(Some(format!("degree {degree}: {e}"))),
        }
    }
    write_file(&dir.join("poly_degrees.csv"), &table)?;
    if let Some(e) = first_err {
        return Err(PipelineError::model(kind, e));
    }

    let best = &ok_rows[polyreg::best_index(&ok_rows)];
    write_json(
        &dir.join("poly_model.json"),
        &PolyModelRecord {
            config_hash: config.config_hash(),
            seed: config.seed,
            features: config.poly.features,
            scaler: data.meta.scaler,
            model: &best.model,
        },
    )?;
    let predicted = best.model.predict_many(&test.x);
    let run = model_run(config, data, kind, predicted, format!("degree={}", best.degree))?;
    write_json(&dir.join(kind.result_file()), &run)?;
    Ok(run)
}

/// `run <model>` against the prepared artifacts in the output directory.
pub fn cmd_run(config: &RunConfig, model: ModelKind) -> Result<ModelRun, PipelineError> {
    let data = load_prepared(&config.out_dir)?;
    if data.meta.config_hash != config.config_hash() {
        warn!(
            "prepared data came from config {}, running with {}",
            data.meta.config_hash,
            config.config_hash()
        );
    }
    info!("running {model}");
    match model {
        ModelKind::Lstm => run_lstm(config, &data),
        ModelKind::Svr => run_svr(config, &data),
        ModelKind::Poly => run_poly(config, &data),
    }
}

#[derive(Debug, Serialize)]
struct ReportFile<'a> {
    config_hash: String,
    seed: u64,
    #[serde(flatten)]
    report: &'a EvalReport,
}

/// `compare`: ranks the stored model results and writes the report and
/// per-model prediction dumps in price units. Without `subset_ok`, every
/// model in `models` must have a result.
pub fn cmd_compare(
    config: &RunConfig,
    models: &[ModelKind],
    subset_ok: bool,
) -> Result<EvalReport, PipelineError> {
    let dir = config.out_dir.as_path();
    let mut runs = Vec::new();
    let mut missing = Vec::new();
    for &m in models {
        let path = dir.join(m.result_file());
        if path.exists() {
            runs.push(read_json::<ModelRun>(&path)?);
        } else {
            missing.push(m.slug());
        }
    }
    if runs.is_empty() || (!missing.is_empty() && !subset_ok) {
        return Err(PipelineError::MissingResults(format!(
            "no result for {} in {} (run those models first, or pass --subset-ok)",
            missing.join(", "),
            dir.display()
        )));
    }
    let fingerprint = runs[0].fingerprint.clone();
    if runs.iter().any(|r| r.fingerprint != fingerprint) {
        warn!("model results come from different prepared datasets");
    }

    let report = eval::compare(runs.iter().map(|r| r.result.clone()).collect(), fingerprint)
        .map_err(|e| PipelineError::MissingResults(e.to_string()))?;

    write_file(
        &dir.join("report.txt"),
        &format!("{}{}", stamp(config).trim_start_matches("# "), report.to_text()),
    )?;
    write_json(
        &dir.join("report.json"),
        &ReportFile {
            config_hash: config.config_hash(),
            seed: config.seed,
            report: &report,
        },
    )?;
    let mut csv = stamp(config);
    csv.push_str("model,mse_normalized,mse_raw\n");
    for r in &report.results {
        csv.push_str(&format!("{},{},{}\n", r.model_name, r.mse_normalized, r.mse_raw));
    }
    write_file(&dir.join("report.csv"), &csv)?;

    for run in &runs {
        let mut dump = stamp(config);
        dump.push_str("date,actual,predicted\n");
        for p in &run.predictions {
            dump.push_str(&format!(
                "{},{},{}\n",
                p.date,
                run.scaler.inverse_one(p.actual),
                run.scaler.inverse_one(p.predicted)
            ));
        }
        write_file(&dir.join(format!("predictions_{}.csv", run.model)), &dump)?;
    }
    Ok(report)
}

/// Reads a pipeline CSV, skipping the comment stamp. Returns the header and
/// the data rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .map(|h| h.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_names_parse() {
        assert_eq!("LSTM".parse::<ModelKind>().unwrap(), ModelKind::Lstm);
        assert_eq!("svm".parse::<ModelKind>().unwrap(), ModelKind::Svr);
        assert!("arima".parse::<ModelKind>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Prepare("x".into()).exit_code(), 2);
        assert_eq!(PipelineError::model(ModelKind::Svr, "x").exit_code(), 3);
        assert_eq!(PipelineError::MissingResults("x".into()).exit_code(), 4);
    }

    #[test]
    fn prepare_in_memory() {
        let mut text = String::from("Date,Open,High,Low,Close,Adj Close,Volume\n");
        for d in 1..=10 {
            let c = 100.0 + d as f64;
            text.push_str(&format!("2021-03-{d:02},{c},{},{},{c},{c},1000\n", c + 1.0, c - 1.0));
        }
        let cfg = RunConfig::default();
        let p = prepare_data(&text, &cfg).unwrap();
        assert_eq!(p.boundary(), 8);
        assert_eq!(p.meta.scaler.min(), 101.0);
        assert_eq!(p.meta.scaler.max(), 108.0);
        assert_eq!(p.normalized[0], 0.0);
        assert_eq!(p.normalized[7], 1.0);
        assert!(p.normalized[9] > 1.0);
    }
}
