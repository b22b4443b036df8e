//! Serialization of reports and plot data.
//!
//! Reports are JSON with a versioned schema; kernel curves are flat CSV
//! plot rows. Both writers are deterministic: identical inputs and
//! configuration produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use linkscan_core::pipeline::{CountryEntry, SeriesStats};
use linkscan_core::{KernelCurve, LinkageReport, Provenance, RunConfig, REPORT_VERSION};

/// Envelope for the `describe` command.
#[derive(Debug, Serialize)]
pub struct DescribeReport {
    pub version: String,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub descriptives: Vec<SeriesStats>,
}

/// Envelope for the `linear` command.
#[derive(Debug, Serialize)]
pub struct LinearReport {
    pub version: String,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub countries: Vec<CountryEntry>,
}

impl DescribeReport {
    pub fn new(config: RunConfig, provenance: Provenance, descriptives: Vec<SeriesStats>) -> Self {
        DescribeReport {
            version: REPORT_VERSION.to_string(),
            config,
            provenance,
            descriptives,
        }
    }
}

impl LinearReport {
    pub fn new(config: RunConfig, provenance: Provenance, countries: Vec<CountryEntry>) -> Self {
        LinearReport {
            version: REPORT_VERSION.to_string(),
            config,
            provenance,
            countries,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> std::io::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Fixed plot-data columns for kernel curves. Skipped grid abscissas do
/// not produce rows; `edge_flag` is 0/1.
pub const CURVE_CSV_HEADER: [&str; 8] = [
    "country",
    "x",
    "fitted",
    "slope",
    "curvature",
    "weight_mass",
    "edge_flag",
    "overlay",
];

/// Renders curves for all countries into one CSV document.
pub fn curves_to_csv(curves: &[(String, KernelCurve)]) -> std::io::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CURVE_CSV_HEADER)?;
    for (country, curve) in curves {
        for (point, &edge) in curve.points.iter().zip(&curve.edge_flags) {
            writer.write_record([
                country.as_str(),
                &point.x.to_string(),
                &point.beta0.to_string(),
                &point.beta1.to_string(),
                &point.beta2.to_string(),
                &point.weight_mass.to_string(),
                if edge { "1" } else { "0" },
                &curve.linear_overlay.value_at(point.x).to_string(),
            ])?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    String::from_utf8(bytes).map_err(|e| std::io::Error::other(e.to_string()))
}

/// Writes to `--out` when given, stdout otherwise.
pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
        }
    }
}

/// Convenience: serialize a full report.
pub fn report_to_json(report: &LinkageReport) -> std::io::Result<String> {
    to_json(report)
}
