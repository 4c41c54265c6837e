//! OHLCV ingestion and preparation: CSV parsing, cleaning, min-max scaling,
//! chronological splitting and sliding windows.
//!
//! Everything here is a pure function of its inputs. The scaler is fit on
//! the training slice only; test values are scaled with the training range
//! and may fall outside `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("missing header: {0}")]
    MissingHeader(String),
    #[error("unknown column `{0}` in header")]
    UnknownColumn(String),
    #[error("row {row}: unparseable date `{value}`")]
    UnparseableDate { row: usize, value: String },
    #[error("row {row}: date format differs from earlier rows (`{value}`)")]
    MixedDateFormats { row: usize, value: String },
    #[error("dates are not strictly increasing at row {row} ({date})")]
    NonMonotonicDates { row: usize, date: NaiveDate },
    #[error("row {row}: invalid bar: {reason}")]
    InvalidBar { row: usize, reason: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("no records left after cleaning")]
    EmptyAfterClean,
    #[error("degenerate value range: min == max == {0}")]
    DegenerateRange(f64),
    #[error("scaler input must be non-empty and finite")]
    InvalidScalerInput,
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("split leaves an empty side ({train} train / {test} test)")]
    EmptySplit { train: usize, test: usize },
    #[error("series of length {len} is too short for window {window}")]
    SeriesTooShort { len: usize, window: usize },
    #[error("window size must be positive")]
    ZeroWindow,
    #[error("record {index} is missing field `{column}`")]
    MissingValue { index: usize, column: PriceColumn },
}

/// Price columns of a bar that can serve as the prediction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PriceColumn {
    Open,
    High,
    Low,
    #[default]
    Close,
    AdjClose,
    Volume,
}

impl PriceColumn {
    pub const ALL: [PriceColumn; 6] = [
        PriceColumn::Open,
        PriceColumn::High,
        PriceColumn::Low,
        PriceColumn::Close,
        PriceColumn::AdjClose,
        PriceColumn::Volume,
    ];

    pub fn header(self) -> &'static str {
        match self {
            PriceColumn::Open => "Open",
            PriceColumn::High => "High",
            PriceColumn::Low => "Low",
            PriceColumn::Close => "Close",
            PriceColumn::AdjClose => "Adj Close",
            PriceColumn::Volume => "Volume",
        }
    }
}

impl fmt::Display for PriceColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

impl FromStr for PriceColumn {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "open" => Ok(PriceColumn::Open),
            "high" => Ok(PriceColumn::High),
            "low" => Ok(PriceColumn::Low),
            "close" => Ok(PriceColumn::Close),
            "adjclose" => Ok(PriceColumn::AdjClose),
            "volume" => Ok(PriceColumn::Volume),
            _ => Err(DatasetError::UnknownColumn(s.to_string())),
        }
    }
}

/// One daily market bar. Numeric fields are `None` when the source cell was
/// empty, unparseable or NaN; such records survive parsing and are dropped by
/// [`clean`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvRecord {
    pub date: NaiveDate,
    pub open: Option<f64>,
    pub high: Option<f64>,
    pub low: Option<f64>,
    pub close: Option<f64>,
    pub adj_close: Option<f64>,
    pub volume: Option<f64>,
}

impl OhlcvRecord {
    pub fn get(&self, column: PriceColumn) -> Option<f64> {
        match column {
            PriceColumn::Open => self.open,
            PriceColumn::High => self.high,
            PriceColumn::Low => self.low,
            PriceColumn::Close => self.close,
            PriceColumn::AdjClose => self.adj_close,
            PriceColumn::Volume => self.volume,
        }
    }

    pub fn is_complete(&self) -> bool {
        PriceColumn::ALL.iter().all(|c| self.get(*c).is_some())
    }
}

/// Records ordered by strictly increasing date.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PriceSeries {
    records: Vec<OhlcvRecord>,
}

impl PriceSeries {
    /// Builds a series, checking that dates strictly increase.
    pub fn new(records: Vec<OhlcvRecord>) -> Result<Self, DatasetError> {
        for (row, pair) in records.windows(2).enumerate() {
            if pair[1].date <= pair[0].date {
                return Err(DatasetError::NonMonotonicDates {
                    row: row + 1,
                    date: pair[1].date,
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[OhlcvRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.records.iter().map(|r| r.date).collect()
    }

    /// Extracts one column; fails on the first missing value.
    pub fn column(&self, column: PriceColumn) -> Result<Vec<f64>, DatasetError> {
        self.records
            .iter()
            .enumerate()
            .map(|(index, r)| {
                r.get(column)
                    .ok_or(DatasetError::MissingValue { index, column })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DateFormat {
    DayMonthYear,
    Iso,
}

impl DateFormat {
    fn detect(s: &str) -> Option<Self> {
        if NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok() {
            Some(DateFormat::Iso)
        } else if NaiveDate::parse_from_str(s, "%d/%m/%Y").is_ok() {
            Some(DateFormat::DayMonthYear)
        } else {
            None
        }
    }

    fn parse(self, s: &str) -> Option<NaiveDate> {
        let pattern = match self {
            DateFormat::DayMonthYear => "%d/%m/%Y",
            DateFormat::Iso => "%Y-%m-%d",
        };
        NaiveDate::parse_from_str(s, pattern).ok()
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| !v.is_nan())
}

/// Parses a Yahoo-style OHLCV export.
///
/// The header must name exactly the seven columns `Date, Open, High, Low,
/// Close, Adj Close, Volume` in any order and case. Row numbers in errors are
/// 1-based data rows (the header is row 0).
pub fn parse_csv(text: &str) -> Result<PriceSeries, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();

    let header = match rows.next() {
        Some(h) => h.map_err(|e| DatasetError::Csv(e.to_string()))?,
        None => return Err(DatasetError::MissingHeader("empty input".into())),
    };

    let mut date_idx = None;
    let mut price_idx: [Option<usize>; 6] = [None; 6];
    for (i, name) in header.iter().enumerate() {
        let name = name.trim_start_matches('\u{feff}');
        if name.eq_ignore_ascii_case("date") {
            date_idx = Some(i);
            continue;
        }
        let col: PriceColumn = name.parse()?;
        let slot = PriceColumn::ALL.iter().position(|c| *c == col).unwrap();
        price_idx[slot] = Some(i);
    }
    let date_idx = date_idx.ok_or_else(|| DatasetError::MissingHeader("Date".into()))?;
    let mut price_cols = [0usize; 6];
    for (slot, idx) in price_idx.iter().enumerate() {
        price_cols[slot] = idx
            .ok_or_else(|| DatasetError::MissingHeader(PriceColumn::ALL[slot].header().into()))?;
    }
    let width = header.len();

    let mut format: Option<DateFormat> = None;
    let mut records = Vec::new();
    for (i, row) in rows.enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| DatasetError::Csv(e.to_string()))?;
        if row.iter().all(|c| c.is_empty()) {
            continue;
        }
        if row.len() != width {
            return Err(DatasetError::RaggedRow {
                row: row_no,
                expected: width,
                found: row.len(),
            });
        }

        let raw_date = &row[date_idx];
        let fmt = match format {
            Some(f) => f,
            None => {
                let f = DateFormat::detect(raw_date).ok_or_else(|| {
                    DatasetError::UnparseableDate {
                        row: row_no,
                        value: raw_date.to_string(),
                    }
                })?;
                format = Some(f);
                f
            }
        };
        let date = match fmt.parse(raw_date) {
            Some(d) => d,
            None if DateFormat::detect(raw_date).is_some() => {
                return Err(DatasetError::MixedDateFormats {
                    row: row_no,
                    value: raw_date.to_string(),
                })
            }
            None => {
                return Err(DatasetError::UnparseableDate {
                    row: row_no,
                    value: raw_date.to_string(),
                })
            }
        };

        let v = |slot: usize| parse_number(&row[price_cols[slot]]);
        let record = OhlcvRecord {
            date,
            open: v(0),
            high: v(1),
            low: v(2),
            close: v(3),
            adj_close: v(4),
            volume: v(5),
        };
        validate(&record, row_no)?;
        records.push(record);
    }

    PriceSeries::new(records)
}

fn validate(r: &OhlcvRecord, row: usize) -> Result<(), DatasetError> {
    let invalid = |reason: String| DatasetError::InvalidBar { row, reason };
    for col in &PriceColumn::ALL[..5] {
        if let Some(v) = r.get(*col) {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(format!("{col} = {v} is not a positive finite price")));
            }
        }
    }
    if let Some(vol) = r.volume {
        if !vol.is_finite() || vol < 0.0 {
            return Err(invalid(format!("volume = {vol} is negative or non-finite")));
        }
    }
    if let (Some(low), Some(high)) = (r.low, r.high) {
        if low > high {
            return Err(invalid(format!("low {low} exceeds high {high}")));
        }
        for (name, v) in [("open", r.open), ("close", r.close)] {
            if let Some(v) = v {
                if v < low || v > high {
                    warn!("row {row}: {name} {v} lies outside [{low}, {high}]");
                }
            }
        }
    }
    Ok(())
}

/// Drops every record with a missing field, preserving order.
pub fn clean(series: &PriceSeries) -> Result<PriceSeries, DatasetError> {
    let records: Vec<_> = series
        .records
        .iter()
        .filter(|r| r.is_complete())
        .cloned()
        .collect();
    if records.is_empty() {
        return Err(DatasetError::EmptyAfterClean);
    }
    Ok(PriceSeries { records })
}

/// Min-max range fitted on training values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    min: f64,
    max: f64,
}

impl ScalerParams {
    pub fn new(min: f64, max: f64) -> Result<Self, DatasetError> {
        if !min.is_finite() || !max.is_finite() {
            return Err(DatasetError::InvalidScalerInput);
        }
        if max <= min {
            return Err(DatasetError::DegenerateRange(min));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    pub fn scale_one(&self, v: f64) -> f64 {
        (v - self.min) / self.span()
    }

    pub fn inverse_one(&self, v: f64) -> f64 {
        v * self.span() + self.min
    }

    /// Maps values onto the unit interval. Out-of-range inputs are not clipped.
    pub fn scale(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| self.scale_one(*v)).collect()
    }

    pub fn inverse_scale(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| self.inverse_one(*v)).collect()
    }
}

pub fn fit_scaler(values: &[f64]) -> Result<ScalerParams, DatasetError> {
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(DatasetError::InvalidScalerInput);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ScalerParams::new(min, max)
}

/// Index of the first test record for `n` records at `train_fraction`.
pub fn split_boundary(n: usize, train_fraction: f64) -> Result<usize, DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    // Guard against products such as 0.7 * 10 = 6.999...
    let boundary = (n as f64 * train_fraction + 1e-9).floor() as usize;
    let boundary = boundary.min(n);
    if boundary == 0 || boundary == n {
        return Err(DatasetError::EmptySplit {
            train: boundary,
            test: n - boundary,
        });
    }
    Ok(boundary)
}

/// First `floor(n * train_fraction)` records train, the rest test. No shuffling.
pub fn chronological_split(
    series: &PriceSeries,
    train_fraction: f64,
) -> Result<(PriceSeries, PriceSeries), DatasetError> {
    let boundary = split_boundary(series.len(), train_fraction)?;
    let (train, test) = series.records.split_at(boundary);
    Ok((
        PriceSeries {
            records: train.to_vec(),
        },
        PriceSeries {
            records: test.to_vec(),
        },
    ))
}

/// Sliding windows: sample `k` is `values[k..k + window]` with target
/// `values[k + window]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub window: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Keeps samples whose target index (`k + window` in the source values)
    /// satisfies `keep`.
    pub fn filter_by_target_index(&self, keep: impl Fn(usize) -> bool) -> WindowedDataset {
        let (inputs, targets) = self
            .inputs
            .iter()
            .zip(&self.targets)
            .enumerate()
            .filter(|(k, _)| keep(k + self.window))
            .map(|(_, (x, y))| (x.clone(), *y))
            .unzip();
        WindowedDataset {
            inputs,
            targets,
            window: self.window,
        }
    }
}

pub fn make_windows(values: &[f64], window: usize) -> Result<WindowedDataset, DatasetError> {
    if window == 0 {
        return Err(DatasetError::ZeroWindow);
    }
    if values.len() <= window {
        return Err(DatasetError::SeriesTooShort {
            len: values.len(),
            window,
        });
    }
    let inputs = values.windows(window).map(<[f64]>::to_vec).collect::<Vec<_>>();
    let n = values.len() - window;
    Ok(WindowedDataset {
        inputs: inputs.into_iter().take(n).collect(),
        targets: values[window..].to_vec(),
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "Date,Open,High,Low,Close,Adj Close,Volume\n";

    fn rec(day: u32, close: Option<f64>) -> OhlcvRecord {
        OhlcvRecord {
            date: NaiveDate::from_ymd_opt(2020, 1, day).unwrap(),
            open: Some(1.0),
            high: Some(2.0),
            low: Some(0.5),
            close,
            adj_close: Some(1.0),
            volume: Some(10.0),
        }
    }

    #[test]
    fn parses_table_row() {
        let text = format!(
            "{HEADER}10/01/2020,7878.3076,8166.5541,7726.7749,8166.5541,8166.5541,28714583844\n"
        );
        let s = parse_csv(&text).unwrap();
        assert_eq!(s.len(), 1);
        let r = &s.records()[0];
        assert_eq!(r.date, NaiveDate::from_ymd_opt(2020, 1, 10).unwrap());
        assert_eq!(r.close, Some(8166.5541));
        assert_eq!(r.volume, Some(28714583844.0));
    }

    #[test]
    fn header_only_is_empty_series() {
        assert!(parse_csv(HEADER).unwrap().is_empty());
    }

    #[test]
    fn header_is_order_and_case_insensitive() {
        let text = "volume,CLOSE,date,adj close,low,High,open\n100,5,2020-01-02,5,4,6,5\n";
        let s = parse_csv(text).unwrap();
        assert_eq!(s.records()[0].close, Some(5.0));
        assert_eq!(s.records()[0].volume, Some(100.0));
        assert_eq!(s.records()[0].high, Some(6.0));
    }

    #[test]
    fn empty_close_is_flagged_not_dropped() {
        let text = format!("{HEADER}2020-01-01,5,6,4,,5,10\n2020-01-02,5,6,4,null,5,10\n");
        let s = parse_csv(&text).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.records().iter().all(|r| r.close.is_none()));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_csv(""), Err(DatasetError::MissingHeader(_))));
        assert!(matches!(
            parse_csv("Date,Open,High,Low,Close,Volume\n"),
            Err(DatasetError::MissingHeader(c)) if c == "Adj Close"
        ));
        assert!(matches!(
            parse_csv("Date,Open,High,Low,Close,Adj Close,Volume,Ticker\n"),
            Err(DatasetError::UnknownColumn(c)) if c == "Ticker"
        ));
    }

    #[test]
    fn date_errors_report_row() {
        let text = format!("{HEADER}2020-01-01,5,6,4,5,5,10\nyesterday,5,6,4,5,5,10\n");
        assert_eq!(
            parse_csv(&text),
            Err(DatasetError::UnparseableDate {
                row: 2,
                value: "yesterday".into()
            })
        );
        let mixed = format!("{HEADER}2020-01-01,5,6,4,5,5,10\n02/01/2020,5,6,4,5,5,10\n");
        assert!(matches!(
            parse_csv(&mixed),
            Err(DatasetError::MixedDateFormats { row: 2, .. })
        ));
        let backwards = format!("{HEADER}2020-01-02,5,6,4,5,5,10\n2020-01-01,5,6,4,5,5,10\n");
        assert!(matches!(
            parse_csv(&backwards),
            Err(DatasetError::NonMonotonicDates { row: 1, .. })
        ));
    }

    #[test]
    fn low_above_high_is_rejected() {
        let text = format!("{HEADER}2020-01-01,5,4,6,5,5,10\n");
        assert!(matches!(
            parse_csv(&text),
            Err(DatasetError::InvalidBar { row: 1, .. })
        ));
        // close outside [low, high] only warns
        let text = format!("{HEADER}2020-01-01,5,6,4,7,7,10\n");
        assert!(parse_csv(&text).is_ok());
    }

    #[test]
    fn clean_drops_incomplete_rows() {
        let mut recs: Vec<_> = (1..=10).map(|d| rec(d, Some(d as f64))).collect();
        recs[4].close = None;
        let s = PriceSeries::new(recs).unwrap();
        let c = clean(&s).unwrap();
        assert_eq!(c.len(), 9);
        assert!(c.records().iter().all(OhlcvRecord::is_complete));

        let full = PriceSeries::new((1..=5).map(|d| rec(d, Some(1.0))).collect()).unwrap();
        assert_eq!(clean(&full).unwrap(), full);

        let none = PriceSeries::new((1..=3).map(|d| rec(d, None)).collect()).unwrap();
        assert_eq!(clean(&none), Err(DatasetError::EmptyAfterClean));
    }

    #[test]
    fn scaler_examples() {
        let p = fit_scaler(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!((p.min(), p.max()), (2.0, 6.0));
        assert_eq!(p.scale(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(p.scale(&[8.0]), vec![1.5]);
        assert_eq!(p.inverse_scale(&[0.5]), vec![4.0]);
        assert!(matches!(
            fit_scaler(&[5.0, 5.0, 5.0]),
            Err(DatasetError::DegenerateRange(_))
        ));
        assert!(matches!(
            fit_scaler(&[3.0]),
            Err(DatasetError::DegenerateRange(_))
        ));
        assert_eq!(fit_scaler(&[]), Err(DatasetError::InvalidScalerInput));
    }

    #[test]
    fn split_examples() {
        let series = |n: u32| PriceSeries::new((1..=n).map(|d| rec(d, Some(1.0))).collect()).unwrap();
        let (tr, te) = chronological_split(&series(10), 0.8).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        assert!(tr.records().last().unwrap().date < te.records()[0].date);
        assert!(matches!(
            chronological_split(&series(1), 0.8),
            Err(DatasetError::EmptySplit { .. })
        ));
        assert_eq!(split_boundary(100, 0.8).unwrap(), 80);
        assert_eq!(split_boundary(10, 0.7).unwrap(), 7);
        assert!(split_boundary(10, 1.0).is_err());
    }

    #[test]
    fn window_examples() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        assert_eq!(
            w.inputs,
            vec![vec![1.0, 2.0], vec![2.0, 3.0], vec![3.0, 4.0]]
        );
        assert_eq!(w.targets, vec![3.0, 4.0, 5.0]);
        assert_eq!(make_windows(&[1.0, 2.0, 3.0], 2).unwrap().len(), 1);
        assert!(matches!(
            make_windows(&[1.0, 2.0], 2),
            Err(DatasetError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn window_filter_by_target_index() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        let train = w.filter_by_target_index(|i| i < 4);
        let test = w.filter_by_target_index(|i| i >= 4);
        assert_eq!(train.targets, vec![3.0, 4.0]);
        assert_eq!(test.targets, vec![5.0]);
        assert_eq!(test.inputs, vec![vec![3.0, 4.0]]);
    }
}
