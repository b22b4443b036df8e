//! Golden-file tests: the committed fixture must keep producing exactly
//! the committed report and plot data.
//!
//! Regenerate after an intentional output change with
//! `UPDATE_GOLDEN=1 cargo test -p linkscan --test golden`.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

const FIXTURE: &str = "tests/fixtures/linkage_weekly.csv";
const GOLDEN_REPORT: &str = "tests/golden/analyze.json";
const GOLDEN_CURVES: &str = "tests/golden/kernel.csv";

/// Invokes the binary from the crate root with a relative input path so
/// the echoed provenance is checkout-independent.
fn run_from_crate_root(args: &[&str]) -> Vec<u8> {
    let out = Command::new(common::linkscan_binary())
        .current_dir(manifest_dir())
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn analyze_args() -> Vec<&'static str> {
    vec![
        "analyze",
        "--input",
        FIXTURE,
        "--oil",
        "opec",
        "--world",
        "world",
        "--countries",
        "qatar,oman",
    ]
}

fn kernel_args() -> Vec<&'static str> {
    vec![
        "kernel",
        "--input",
        FIXTURE,
        "--oil",
        "opec",
        "--world",
        "world",
        "--countries",
        "qatar,oman",
        "--grid-points",
        "25",
    ]
}

fn check_or_update(golden_rel: &str, actual: &[u8]) {
    let golden_path = manifest_dir().join(golden_rel);
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::create_dir_all(golden_path.parent().unwrap()).unwrap();
        std::fs::write(&golden_path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&golden_path)
        .unwrap_or_else(|e| panic!("missing golden {golden_rel} ({e}); run with UPDATE_GOLDEN=1"));
    assert!(
        expected == actual,
        "{golden_rel} drifted from the committed golden; \
         rerun with UPDATE_GOLDEN=1 if the change is intentional"
    );
}

fn ensure_fixture() {
    let path = manifest_dir().join(FIXTURE);
    if !path.exists() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        common::write_linkage_fixture(&manifest_dir().join("tests/fixtures"));
    }
}

#[test]
fn committed_fixture_is_reproducible() {
    ensure_fixture();
    let expected = std::fs::read(manifest_dir().join(FIXTURE)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let regenerated = common::write_linkage_fixture(dir.path());
    let actual = std::fs::read(regenerated).unwrap();
    assert_eq!(expected, actual, "fixture generator drifted");
}

#[test]
fn golden_analyze_report_matches() {
    ensure_fixture();
    let first = run_from_crate_root(&analyze_args());
    let second = run_from_crate_root(&analyze_args());
    assert_eq!(first, second, "analyze output varies across runs");
    check_or_update(GOLDEN_REPORT, &first);
}

#[test]
fn golden_kernel_csv_matches() {
    ensure_fixture();
    let first = run_from_crate_root(&kernel_args());
    let second = run_from_crate_root(&kernel_args());
    assert_eq!(first, second, "kernel output varies across runs");
    check_or_update(GOLDEN_CURVES, &first);
}

#[test]
fn golden_report_has_the_documented_top_level_shape() {
    ensure_fixture();
    let golden_path = manifest_dir().join(GOLDEN_REPORT);
    if !golden_path.exists() {
        // The shape check runs against fresh output when goldens have not
        // been generated yet.
        let bytes = run_from_crate_root(&analyze_args());
        check_shape(&bytes);
        return;
    }
    check_shape(&std::fs::read(golden_path).unwrap());
}

fn check_shape(bytes: &[u8]) {
    let value: serde_json::Value = serde_json::from_slice(bytes).unwrap();
    for key in ["version", "config", "provenance", "descriptives", "countries", "curves"] {
        assert!(value.get(key).is_some(), "missing top-level key {key}");
    }
    assert_eq!(value["version"], "1");
    assert!(value["countries"].as_array().unwrap().len() == 2);
    assert!(value["curves"].as_array().unwrap().len() == 2);
}

/// One-time helper: materialize fixture and goldens into the source tree.
#[test]
#[ignore]
fn regenerate_fixture_and_goldens() {
    let fixtures = manifest_dir().join("tests/fixtures");
    std::fs::create_dir_all(&fixtures).unwrap();
    common::write_linkage_fixture(&fixtures);
    assert!(Path::new(&manifest_dir().join(FIXTURE)).exists());

    std::fs::create_dir_all(manifest_dir().join("tests/golden")).unwrap();
    let report = run_from_crate_root(&analyze_args());
    std::fs::write(manifest_dir().join(GOLDEN_REPORT), report).unwrap();
    let curves = run_from_crate_root(&kernel_args());
    std::fs::write(manifest_dir().join(GOLDEN_CURVES), curves).unwrap();
}
