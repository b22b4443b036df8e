//! CSV ingestion: column lookup, date alignment and return computation.
//!
//! The input is a single wide CSV with a `date` first column and one
//! price column per series. Rows where any requested column is empty are
//! dropped (and counted), which makes the inner join on dates explicit
//! and auditable.

use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};
use thiserror::Error;

use linkscan_core::{
    compute_returns, AlignedBundle, InputDigest, PriceSeries, ReturnMode,
};

/// Which columns make up the dataset and how returns are derived.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub oil_column: String,
    pub world_column: String,
    pub country_columns: Vec<String>,
    pub returns_mode: ReturnMode,
}

impl DatasetManifest {
    /// Oil, world and country columns must be pairwise distinct.
    pub fn check_disjoint(&self) -> Result<(), IngestError> {
        let mut seen = vec![&self.oil_column, &self.world_column];
        for c in &self.country_columns {
            seen.push(c);
        }
        for (i, a) in seen.iter().enumerate() {
            for b in seen.iter().skip(i + 1) {
                if a == b {
                    return Err(IngestError::OverlappingColumns { column: (*a).clone() });
                }
            }
        }
        Ok(())
    }

    fn requested(&self) -> Vec<&str> {
        let mut cols = vec![self.oil_column.as_str(), self.world_column.as_str()];
        cols.extend(self.country_columns.iter().map(|c| c.as_str()));
        cols
    }
}

/// Non-missing observation span of one column, reported when alignment
/// leaves too few rows.
#[derive(Debug, Clone)]
pub struct ColumnSpan {
    pub column: String,
    pub observations: usize,
    pub first: Option<NaiveDate>,
    pub last: Option<NaiveDate>,
}

impl fmt::Display for ColumnSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.first, self.last) {
            (Some(first), Some(last)) => write!(
                f,
                "{}: {} observations spanning {first}..{last}",
                self.column, self.observations
            ),
            _ => write!(f, "{}: no observations", self.column),
        }
    }
}

fn format_spans(spans: &[ColumnSpan]) -> String {
    spans
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input must have a header row starting with a 'date' column, found '{found}'")]
    MissingDateColumn { found: String },
    #[error("unknown column '{column}' (available: {available})")]
    UnknownColumn { column: String, available: String },
    #[error("column '{column}' appears more than once in the header")]
    DuplicateColumn { column: String },
    #[error("column '{column}' requested more than once")]
    OverlappingColumns { column: String },
    #[error("line {line}: cannot parse date '{value}' (expected ISO-8601 yyyy-mm-dd)")]
    BadDate { line: usize, value: String },
    #[error("line {line}: dates must be strictly increasing ({previous} followed by {date})")]
    NonIncreasingDate {
        line: usize,
        previous: NaiveDate,
        date: NaiveDate,
    },
    #[error("line {line}, column '{column}': cannot parse price '{value}'")]
    BadPrice {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}, column '{column}': price {value} is not positive")]
    NonPositivePrice {
        line: usize,
        column: String,
        value: f64,
    },
    #[error(
        "only {aligned} aligned row(s) across the requested columns (need at least 10); {}",
        format_spans(spans)
    )]
    TooFewAlignedRows {
        aligned: usize,
        spans: Vec<ColumnSpan>,
    },
    #[error("{0}")]
    Core(#[from] linkscan_core::Error),
}

fn is_missing(cell: Option<&str>) -> bool {
    matches!(cell, None | Some("")) || cell.is_some_and(|c| c.trim().is_empty())
}

/// Reads the file, aligns the requested columns on dates, and returns the
/// per-series returns together with alignment bookkeeping.
pub fn ingest(path: &Path, manifest: &DatasetManifest) -> Result<AlignedBundle, IngestError> {
    manifest.check_disjoint()?;
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let sha256 = {
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect::<String>()
    };

    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(bytes.as_slice());
    let headers = reader.headers()?.clone();
    let first = headers.get(0).unwrap_or("").trim().to_string();
    if first != "date" {
        return Err(IngestError::MissingDateColumn { found: first });
    }

    let requested = manifest.requested();
    let mut indices = Vec::with_capacity(requested.len());
    for column in &requested {
        let matches: Vec<usize> = headers
            .iter()
            .enumerate()
            .filter(|(_, h)| h.trim() == *column)
            .map(|(i, _)| i)
            .collect();
        match matches.len() {
            0 => {
                return Err(IngestError::UnknownColumn {
                    column: (*column).to_string(),
                    available: headers.iter().skip(1).collect::<Vec<_>>().join(", "),
                })
            }
            1 => indices.push(matches[0]),
            _ => return Err(IngestError::DuplicateColumn { column: (*column).to_string() }),
        }
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); requested.len()];
    // Per-column span bookkeeping over non-missing cells.
    let mut spans: Vec<(usize, Option<(NaiveDate, NaiveDate)>)> = vec![(0, None); requested.len()];
    let mut dropped_rows = 0_usize;
    let mut previous_date: Option<NaiveDate> = None;

    for (record_index, record) in reader.records().enumerate() {
        let record = record?;
        let line = record_index + 2; // header occupies line 1
        let raw_date = record.get(0).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|_| {
            IngestError::BadDate { line, value: raw_date.to_string() }
        })?;
        if let Some(previous) = previous_date {
            if date <= previous {
                return Err(IngestError::NonIncreasingDate { line, previous, date });
            }
        }
        previous_date = Some(date);

        let mut row = Vec::with_capacity(requested.len());
        let mut complete = true;
        for (slot, (&idx, column)) in indices.iter().zip(&requested).enumerate() {
            let cell = record.get(idx);
            if is_missing(cell) {
                complete = false;
                row.push(f64::NAN);
                continue;
            }
            let text = cell.unwrap().trim();
            let value: f64 = text.parse().map_err(|_| IngestError::BadPrice {
                line,
                column: (*column).to_string(),
                value: text.to_string(),
            })?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(IngestError::NonPositivePrice {
                    line,
                    column: (*column).to_string(),
                    value,
                });
            }
            let (count, span) = &mut spans[slot];
            *count += 1;
            *span = match *span {
                None => Some((date, date)),
                Some((first, _)) => Some((first, date)),
            };
            row.push(value);
        }

        if complete {
            dates.push(date);
            for (slot, value) in row.into_iter().enumerate() {
                columns[slot].push(value);
            }
        } else {
            dropped_rows += 1;
        }
    }

    let aligned_rows = dates.len();
    if aligned_rows < 10 {
        let spans = requested
            .iter()
            .zip(&spans)
            .map(|(column, (observations, span))| ColumnSpan {
                column: (*column).to_string(),
                observations: *observations,
                first: span.map(|(f, _)| f),
                last: span.map(|(_, l)| l),
            })
            .collect();
        return Err(IngestError::TooFewAlignedRows { aligned: aligned_rows, spans });
    }

    let mut series = Vec::with_capacity(requested.len());
    for (column, values) in requested.iter().zip(columns) {
        let prices = PriceSeries::new(column.to_string(), dates.clone(), values)?;
        series.push(compute_returns(&prices, manifest.returns_mode)?);
    }
    let countries = series.split_off(2);
    let world = series.pop().expect("world series present");
    let oil = series.pop().expect("oil series present");

    Ok(AlignedBundle {
        oil,
        world,
        countries,
        dropped_rows,
        aligned_rows,
        input: Some(InputDigest {
            path: path.display().to_string(),
            sha256,
        }),
        timestamp: reproducible_timestamp(),
    })
}

/// RFC 3339 timestamp from `SOURCE_DATE_EPOCH` when set; `None`
/// otherwise, keeping default output byte-reproducible.
pub fn reproducible_timestamp() -> Option<String> {
    let epoch: i64 = std::env::var("SOURCE_DATE_EPOCH").ok()?.parse().ok()?;
    let utc = chrono::DateTime::from_timestamp(epoch, 0)?;
    Some(utc.to_rfc3339())
}
