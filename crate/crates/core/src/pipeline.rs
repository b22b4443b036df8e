//! The two-step linkage procedure and report assembly.
//!
//! Step one regresses world market returns on oil returns and keeps the
//! residuals as an oil-filtered world factor. Step two regresses each
//! country's returns on the filtered factor and the oil returns, adds the
//! country's own lagged return when first-order serial correlation is
//! detected, and switches to White-robust standard errors when the White
//! test rejects homoskedasticity. The report bundles the estimates with
//! descriptive statistics and per-country kernel curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Error;
use crate::kernel::{fit_curve, Bandwidth, KernelCurve, KernelKind, KernelSpec};
use crate::ols::{
    classical_covariance, durbin_watson, fit_metrics, fit_ols, serial_correlation_test,
    white_covariance, white_test, FitMetrics, HcVariant, NamedColumn, RegressionFit,
    RegressionSpec,
};
use crate::series::{ReturnMode, ReturnSeries};
use crate::stats::{describe, stars_from_p, stars_label, DescriptiveStats, TestResult};
use crate::Result;

/// Schema version stamped into serialized reports.
pub const REPORT_VERSION: &str = "1";

/// Run-wide configuration with the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Bandwidth as a share of the oil-return range.
    pub bandwidth_factor: f64,
    /// Number of evaluation grid points per kernel curve.
    pub grid_points: usize,
    pub kernel: KernelKind,
    /// White covariance variant used when heteroskedasticity is detected.
    pub hc: HcVariant,
    /// p-value threshold that triggers AR(1) augmentation and robust
    /// covariance.
    pub threshold: f64,
    /// Include the oil-filtered world factor in the country equation.
    pub filtered_factor: bool,
    /// Seed echoed into reports; consumed by simulation helpers.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bandwidth_factor: crate::kernel::DEFAULT_BANDWIDTH_FACTOR,
            grid_points: 100,
            kernel: KernelKind::Gaussian,
            hc: HcVariant::Hc0,
            threshold: 0.05,
            filtered_factor: true,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_factor > 0.0) || !self.bandwidth_factor.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bandwidth factor must be positive, got {}",
                self.bandwidth_factor
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidInput(format!(
                "grid points must be at least 2, got {}",
                self.grid_points
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidInput(format!(
                "diagnostic threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        KernelSpec {
            kind: self.kernel,
            bandwidth: Bandwidth::FactorOfRange(self.bandwidth_factor),
        }
    }

    pub fn policy(&self) -> DiagnosticsPolicy {
        DiagnosticsPolicy {
            threshold: self.threshold,
            hc_variant: self.hc,
            include_filtered: self.filtered_factor,
        }
    }
}

/// How the per-country diagnostics drive the estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsPolicy {
    pub threshold: f64,
    pub hc_variant: HcVariant,
    pub include_filtered: bool,
}

impl Default for DiagnosticsPolicy {
    fn default() -> Self {
        RunConfig::default().policy()
    }
}

/// Digest of the ingested input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Aligned return series for one run: oil, world and at least one country,
/// all on identical dates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedBundle {
    pub oil: ReturnSeries,
    pub world: ReturnSeries,
    pub countries: Vec<ReturnSeries>,
    /// Price rows dropped during alignment.
    pub dropped_rows: usize,
    /// Price rows retained after alignment.
    pub aligned_rows: usize,
    pub input: Option<InputDigest>,
    /// RFC 3339 timestamp echoed into the report provenance. Callers that
    /// need byte-reproducible output leave it `None` or pin it.
    pub timestamp: Option<String>,
}

impl AlignedBundle {
    fn check(&self) -> Result<()> {
        if self.countries.is_empty() {
            return Err(Error::InvalidInput(
                "dataset must contain at least one country series".into(),
            ));
        }
        self.world.check_aligned(&self.oil)?;
        for country in &self.countries {
            country.check_aligned(&self.oil)?;
        }
        Ok(())
    }

    /// The provenance block echoed into serialized reports.
    pub fn provenance(&self) -> Provenance {
        Provenance {
            input: self.input.clone(),
            oil_series: self.oil.name.clone(),
            world_series: self.world.name.clone(),
            country_series: self.countries.iter().map(|c| c.name.clone()).collect(),
            returns_mode: self.oil.mode,
            dropped_rows: self.dropped_rows,
            aligned_rows: self.aligned_rows,
            timestamp: self.timestamp.clone(),
        }
    }
}

/// Result of the world-on-oil filtering regression.
#[derive(Debug, Clone)]
pub struct FilterResult {
    pub alpha: f64,
    pub beta: f64,
    /// Residual series: the world factor orthogonalized to oil returns.
    pub vmsci: ReturnSeries,
    pub source_fit: RegressionFit,
}

/// One estimated coefficient with its standard error and significance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub stars: u8,
    pub stars_label: String,
}

/// Which covariance the reported standard errors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovarianceKind {
    #[serde(rename = "classical")]
    Classical,
    #[serde(rename = "white-hc0")]
    WhiteHc0,
    #[serde(rename = "white-hc1")]
    WhiteHc1,
}

/// Diagnostics attached to the final per-country fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryDiagnostics {
    /// Serial-correlation LM test on the final specification.
    pub serial_correlation: Option<TestResult>,
    /// White heteroskedasticity test on the final specification.
    pub white: Option<TestResult>,
    /// True when the White auxiliary design kept its cross products;
    /// false records the squares-only fallback.
    pub white_cross_terms: bool,
    pub durbin_watson: Option<f64>,
    /// Serial correlation still detected after AR(1) augmentation.
    pub unresolved_serial_correlation: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Estimates, diagnostics and metrics for one country equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryResult {
    pub country: String,
    pub coefficients: Vec<CoefficientEstimate>,
    pub covariance_kind: CovarianceKind,
    pub ar1_added: bool,
    pub n: usize,
    pub k: usize,
    pub diagnostics: CountryDiagnostics,
    pub metrics: FitMetrics,
}

impl CountryResult {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientEstimate> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Descriptive statistics for one series, or the reason they are
/// unavailable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub series: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<DescriptiveStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A country's estimation outcome: either a result or a skip reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryEntry {
    pub country: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<CountryResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// A country's kernel curve, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub country: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<KernelCurve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Run provenance: input identity, alignment bookkeeping and timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    pub oil_series: String,
    pub world_series: String,
    pub country_series: Vec<String>,
    pub returns_mode: ReturnMode,
    pub dropped_rows: usize,
    pub aligned_rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

/// The full analysis output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkageReport {
    pub version: String,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub descriptives: Vec<SeriesStats>,
    pub countries: Vec<CountryEntry>,
    pub curves: Vec<CurveEntry>,
}

/// Regresses world returns on oil returns (with intercept) and returns
/// the residual series as the oil-filtered world factor.
pub fn filter_world_returns(rmsci: &ReturnSeries, ropec: &ReturnSeries) -> Result<FilterResult> {
    rmsci.check_aligned(ropec)?;
    if rmsci.len() < 4 {
        return Err(Error::InsufficientData { required: 4, found: rmsci.len() });
    }
    let spec = RegressionSpec::new(
        rmsci.name.clone(),
        rmsci.values.clone(),
        vec![NamedColumn::new(ropec.name.clone(), ropec.values.clone())],
        true,
    );
    let fit = fit_ols(&spec)?;
    let alpha = fit.coefficient("intercept").expect("intercept present");
    let beta = fit.coefficient(&ropec.name).expect("oil regressor present");
    let vmsci = ReturnSeries {
        name: format!("{}_filtered", rmsci.name),
        dates: rmsci.dates.clone(),
        values: fit.residuals.clone(),
        mode: rmsci.mode,
    };
    Ok(FilterResult { alpha, beta, vmsci, source_fit: fit })
}

fn student_t_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive df");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

fn coefficient_table(
    fit: &RegressionFit,
    cov: &nalgebra::DMatrix<f64>,
) -> Vec<CoefficientEstimate> {
    let df = (fit.n - fit.k) as f64;
    fit.names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = fit.coefficients[j];
            let variance = cov[(j, j)].max(0.0);
            let std_error = variance.sqrt();
            let p_value = if std_error > 0.0 {
                student_t_p(estimate / std_error, df)
            } else if estimate == 0.0 {
                1.0
            } else {
                0.0
            };
            let stars = stars_from_p(p_value);
            CoefficientEstimate {
                name: name.clone(),
                estimate,
                std_error,
                p_value,
                stars,
                stars_label: stars_label(stars).to_string(),
            }
        })
        .collect()
}

/// Estimates one country's linkage equation under the policy: fit, test
/// for first-order serial correlation, refit with the country's lagged
/// return (dropping the first observation) when the test rejects, then
/// run the White test on the final fit and choose robust standard errors
/// when it rejects.
pub fn estimate_linkage(
    r_country: &ReturnSeries,
    filter: &FilterResult,
    ropec: &ReturnSeries,
    policy: &DiagnosticsPolicy,
) -> Result<CountryResult> {
    r_country.check_aligned(ropec)?;
    r_country.check_aligned(&filter.vmsci)?;
    let n = r_country.len();
    if n < 6 {
        return Err(Error::InsufficientData { required: 6, found: n });
    }

    let base_regressors = |lo: usize| -> Vec<NamedColumn> {
        let mut regs = Vec::new();
        if policy.include_filtered {
            regs.push(NamedColumn::new(
                filter.vmsci.name.clone(),
                filter.vmsci.values[lo..].to_vec(),
            ));
        }
        regs.push(NamedColumn::new(
            ropec.name.clone(),
            ropec.values[lo..].to_vec(),
        ));
        regs
    };

    let mut warnings = Vec::new();

    let initial_spec = RegressionSpec::new(
        r_country.name.clone(),
        r_country.values.clone(),
        base_regressors(0),
        true,
    );
    let initial_fit = fit_ols(&initial_spec)?;

    let initial_serial = match serial_correlation_test(&initial_fit, 1) {
        Ok(t) => Some(t),
        Err(e) if e.is_degenerate() => {
            warnings.push(format!("serial-correlation test unavailable: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let needs_ar1 = initial_serial
        .as_ref()
        .is_some_and(|t| t.p_value < policy.threshold);

    let (fit, serial, ar1_added) = if needs_ar1 {
        let mut regs = base_regressors(1);
        regs.push(NamedColumn::new(
            format!("{}_lag1", r_country.name),
            r_country.values[..n - 1].to_vec(),
        ));
        let spec = RegressionSpec::new(
            r_country.name.clone(),
            r_country.values[1..].to_vec(),
            regs,
            true,
        );
        let fit = fit_ols(&spec)?;
        let serial = match serial_correlation_test(&fit, 1) {
            Ok(t) => Some(t),
            Err(e) if e.is_degenerate() => {
                warnings.push(format!("serial-correlation re-test unavailable: {e}"));
                None
            }
            Err(e) => return Err(e),
        };
        (fit, serial, true)
    } else {
        (initial_fit, initial_serial, false)
    };

    let unresolved = ar1_added
        && serial
            .as_ref()
            .is_some_and(|t| t.p_value < policy.threshold);
    if unresolved {
        warnings.push(
            "serial correlation persists after adding the lagged return".to_string(),
        );
    }

    let (white, white_cross_terms) = match white_test(&fit, true) {
        Ok(t) => (Some(t), true),
        Err(Error::DegenerateAuxiliary { .. }) => match white_test(&fit, false) {
            Ok(t) => {
                warnings.push(
                    "White auxiliary design fell back to squares only".to_string(),
                );
                (Some(t), false)
            }
            Err(e) if e.is_degenerate() => {
                warnings.push(format!("White test unavailable: {e}"));
                (None, false)
            }
            Err(e) => return Err(e),
        },
        Err(e) => return Err(e),
    };

    let heteroskedastic = white
        .as_ref()
        .is_some_and(|t| t.p_value < policy.threshold);
    let (cov, covariance_kind) = if heteroskedastic {
        let kind = match policy.hc_variant {
            HcVariant::Hc0 => CovarianceKind::WhiteHc0,
            HcVariant::Hc1 => CovarianceKind::WhiteHc1,
        };
        (white_covariance(&fit, policy.hc_variant)?, kind)
    } else {
        (classical_covariance(&fit)?, CovarianceKind::Classical)
    };

    let coefficients = coefficient_table(&fit, &cov);
    let metrics = fit_metrics(&fit)?;
    let dw = match durbin_watson(&fit.residuals) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("Durbin-Watson unavailable: {e}"));
            None
        }
    };

    Ok(CountryResult {
        country: r_country.name.clone(),
        coefficients,
        covariance_kind,
        ar1_added,
        n: fit.n,
        k: fit.k,
        diagnostics: CountryDiagnostics {
            serial_correlation: serial,
            white,
            white_cross_terms,
            durbin_watson: dw,
            unresolved_serial_correlation: unresolved,
            warnings,
        },
        metrics,
    })
}

/// Runs the full procedure over an aligned dataset and assembles the
/// report. Per-country estimation or smoothing failures are recorded as
/// skip reasons instead of aborting the run; only structural problems
/// (no countries, misaligned dates, invalid configuration) are fatal.
pub fn run_pipeline(bundle: &AlignedBundle, config: &RunConfig) -> Result<LinkageReport> {
    config.validate()?;
    bundle.check()?;

    let mut descriptives = Vec::with_capacity(bundle.countries.len() + 2);
    for series in std::iter::once(&bundle.oil)
        .chain(std::iter::once(&bundle.world))
        .chain(bundle.countries.iter())
    {
        match describe(series) {
            Ok(stats) => descriptives.push(SeriesStats {
                series: series.name.clone(),
                stats: Some(stats),
                error: None,
            }),
            Err(e) => descriptives.push(SeriesStats {
                series: series.name.clone(),
                stats: None,
                error: Some(e.to_string()),
            }),
        }
    }

    let filter = filter_world_returns(&bundle.world, &bundle.oil);
    let policy = config.policy();
    let kernel_spec = config.kernel_spec();

    let (countries, curves): (Vec<CountryEntry>, Vec<CurveEntry>) = bundle
        .countries
        .par_iter()
        .map(|country| {
            let entry = match &filter {
                Ok(filter) => match estimate_linkage(country, filter, &bundle.oil, &policy) {
                    Ok(result) => CountryEntry {
                        country: country.name.clone(),
                        result: Some(result),
                        skipped: None,
                    },
                    Err(e) => CountryEntry {
                        country: country.name.clone(),
                        result: None,
                        skipped: Some(e.to_string()),
                    },
                },
                Err(e) => CountryEntry {
                    country: country.name.clone(),
                    result: None,
                    skipped: Some(format!("world-factor filter failed: {e}")),
                },
            };
            let curve = match fit_curve(
                &bundle.oil.values,
                &country.values,
                &kernel_spec,
                config.grid_points,
            ) {
                Ok(curve) => CurveEntry {
                    country: country.name.clone(),
                    curve: Some(curve),
                    skipped: None,
                },
                Err(e) => CurveEntry {
                    country: country.name.clone(),
                    curve: None,
                    skipped: Some(e.to_string()),
                },
            };
            (entry, curve)
        })
        .unzip();

    Ok(LinkageReport {
        version: REPORT_VERSION.to_string(),
        config: config.clone(),
        provenance: bundle.provenance(),
        descriptives,
        countries,
        curves,
    })
}
