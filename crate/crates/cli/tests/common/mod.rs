//! Shared fixture builders and binary invocation helpers.
#![allow(dead_code)] // each test target uses its own subset

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use linkscan_core::synth::{linkage_bundle, weekly_dates, SynthParams};
use linkscan_core::AlignedBundle;

pub fn linkscan_binary() -> &'static str {
    env!("CARGO_BIN_EXE_linkscan")
}

/// Runs the binary with a scrubbed environment so output is reproducible
/// regardless of the invoking shell.
pub fn run_linkscan<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(linkscan_binary())
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

pub fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

/// Rebuilds price levels from a return series: p_0 = 100, log returns.
fn price_path(returns: &[f64]) -> Vec<f64> {
    let mut prices = Vec::with_capacity(returns.len() + 1);
    let mut level = 100.0_f64;
    prices.push(level);
    for r in returns {
        level *= r.exp();
        prices.push(level);
    }
    prices
}

/// Renders a wide price CSV for a synthetic bundle. Returns in the bundle
/// are log returns, so the reconstructed prices reproduce them (up to
/// float rounding) when re-ingested in log mode.
pub fn bundle_to_price_csv(bundle: &AlignedBundle) -> String {
    let n_prices = bundle.oil.len() + 1;
    let dates = weekly_dates(n_prices);
    let mut header = String::from("date");
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for series in std::iter::once(&bundle.oil)
        .chain(std::iter::once(&bundle.world))
        .chain(bundle.countries.iter())
    {
        header.push(',');
        header.push_str(&series.name);
        columns.push((series.name.clone(), price_path(&series.values)));
    }
    let mut out = header;
    out.push('\n');
    for (i, date) in dates.iter().enumerate() {
        out.push_str(&date.to_string());
        for (_, prices) in &columns {
            out.push(',');
            out.push_str(&prices[i].to_string());
        }
        out.push('\n');
    }
    out
}

/// Writes the seeded two-country fixture used across the test suite.
pub fn write_linkage_fixture(dir: &Path) -> PathBuf {
    let bundle = linkage_bundle(42, &["qatar", "oman"], &SynthParams::default());
    let path = dir.join("linkage_weekly.csv");
    std::fs::write(&path, bundle_to_price_csv(&bundle)).expect("fixture written");
    path
}

/// Constant prices: every derived return is exactly zero.
pub fn write_constant_fixture(dir: &Path) -> PathBuf {
    let dates = weekly_dates(30);
    let mut out = String::from("date,opec,world,qatar\n");
    for date in dates {
        out.push_str(&format!("{date},60,1000,800\n"));
    }
    let path = dir.join("constant.csv");
    std::fs::write(&path, out).expect("fixture written");
    path
}

/// Country returns that are an exact quadratic in the oil returns:
/// `y = 0.1 + 0.8 x + 2 x^2`.
pub const QUAD_COEFFS: (f64, f64, f64) = (0.1, 0.8, 2.0);

pub fn write_quadratic_fixture(dir: &Path) -> PathBuf {
    let n_returns = 40;
    let oil_returns: Vec<f64> = (0..n_returns)
        .map(|t| 0.05 * (t as f64 * 0.7).sin() + 0.01 * (t as f64 * 0.23).cos())
        .collect();
    let (a, b, c) = QUAD_COEFFS;
    let country_returns: Vec<f64> = oil_returns
        .iter()
        .map(|&x| a + b * x + c * x * x)
        .collect();
    let world_returns: Vec<f64> = oil_returns.iter().map(|&x| 0.2 * x + 0.001).collect();

    let dates = weekly_dates(n_returns + 1);
    let oil = price_path(&oil_returns);
    let world = price_path(&world_returns);
    let country = price_path(&country_returns);
    let mut out = String::from("date,opec,world,qatar\n");
    for (i, date) in dates.iter().enumerate() {
        out.push_str(&format!("{date},{},{},{}\n", oil[i], world[i], country[i]));
    }
    let path = dir.join("quadratic.csv");
    std::fs::write(&path, out).expect("fixture written");
    path
}

/// Standard argument block for the two-country fixture.
pub fn fixture_args(path: &Path) -> Vec<String> {
    vec![
        "--input".into(),
        path.display().to_string(),
        "--oil".into(),
        "opec".into(),
        "--world".into(),
        "world".into(),
        "--countries".into(),
        "qatar,oman".into(),
    ]
}
