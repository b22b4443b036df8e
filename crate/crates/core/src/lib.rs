//! Statistical core for oil-price / stock-market linkage analysis.
//!
//! The crate is organised around the stages of the analysis:
//!
//! - [`series`]: dated price and return series and the price-to-return
//!   transformation.
//! - [`stats`]: descriptive statistics and the Jarque-Bera normality test.
//! - [`ols`]: ordinary least squares with classical and White-robust
//!   covariance, heteroskedasticity and serial-correlation diagnostics,
//!   and fit metrics.
//! - [`kernel`]: order-2 local polynomial kernel regression over a grid,
//!   with a global linear overlay for comparison plots.
//! - [`pipeline`]: the two-step estimation procedure (oil-filtered world
//!   factor, then per-country linkage regressions) and report assembly.
//! - [`synth`]: seeded synthetic dataset generation for tests, benchmarks
//!   and simulation runs.

pub mod error;
pub mod kernel;
mod linalg;
pub mod ols;
pub mod pipeline;
pub mod series;
pub mod stats;
pub mod synth;

pub use error::Error;
pub use kernel::{
    default_bandwidth, fit_curve, kernel_weight, local_poly_fit, Bandwidth, KernelCurve,
    KernelKind, KernelSpec, LinearOverlay, LocalFitPoint,
};
pub use ols::{
    classical_covariance, durbin_watson, fit_metrics, fit_ols, serial_correlation_test,
    white_covariance, white_test, FitMetrics, HcVariant, NamedColumn, RegressionFit,
    RegressionSpec,
};
pub use pipeline::{
    estimate_linkage, filter_world_returns, run_pipeline, AlignedBundle, CoefficientEstimate,
    CountryEntry, CountryResult, CovarianceKind, CurveEntry, DiagnosticsPolicy, FilterResult,
    InputDigest, LinkageReport, Provenance, RunConfig, SeriesStats, REPORT_VERSION,
};
pub use series::{compute_returns, PriceSeries, ReturnMode, ReturnSeries};
pub use stats::{describe, jarque_bera, DescriptiveStats, TestDistribution, TestResult};

/// A convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
