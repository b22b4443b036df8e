//! Ordinary least squares with classical and White-robust covariance,
//! heteroskedasticity and serial-correlation diagnostics, and fit metrics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::Error;
use crate::linalg;
use crate::stats::{TestDistribution, TestResult};
use crate::Result;

/// A named data column used as a regressor.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedColumn {
    pub name: String,
    pub values: Vec<f64>,
}

impl NamedColumn {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        NamedColumn { name: name.into(), values }
    }
}

/// The design of one regression: response, ordered regressors and an
/// intercept flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub response_name: String,
    pub response: Vec<f64>,
    pub regressors: Vec<NamedColumn>,
    pub include_intercept: bool,
}

impl RegressionSpec {
    pub fn new(
        response_name: impl Into<String>,
        response: Vec<f64>,
        regressors: Vec<NamedColumn>,
        include_intercept: bool,
    ) -> Self {
        RegressionSpec {
            response_name: response_name.into(),
            response,
            regressors,
            include_intercept,
        }
    }
}

/// White covariance variant: `hc1` rescales the `hc0` sandwich by
/// `n / (n - k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HcVariant {
    Hc0,
    Hc1,
}

impl std::fmt::Display for HcVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HcVariant::Hc0 => write!(f, "hc0"),
            HcVariant::Hc1 => write!(f, "hc1"),
        }
    }
}

/// One estimated regression: coefficients, residuals and both covariance
/// estimates, together with the design needed by the diagnostic tests.
///
/// `coefficients[i]` belongs to `names[i]`; when an intercept is included
/// it is the first entry, named `intercept`.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub response: Vec<f64>,
    /// Maximum-likelihood error variance `sum(e^2) / n`.
    pub sigma2_ml: f64,
    pub classical_cov: DMatrix<f64>,
    pub robust_cov: DMatrix<f64>,
    pub n: usize,
    pub k: usize,
    pub include_intercept: bool,
    /// The `n x k` design matrix, intercept column first when present.
    pub design: DMatrix<f64>,
}

impl RegressionFit {
    /// Looks a coefficient up by regressor name.
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    /// Sum of squared residuals.
    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

/// Goodness-of-fit summary for a regression with intercept.
///
/// For a numerically perfect fit the F statistic and log-likelihood
/// overflow; they are reported clamped to `f64::MAX` (and the AIC to
/// `-f64::MAX`) so serialized reports stay finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics {
    pub r2: f64,
    pub adj_r2: f64,
    pub log_likelihood: f64,
    pub f_stat: TestResult,
    /// Per-observation Akaike criterion `(-2 LL + 2k) / n`.
    pub aic: f64,
}

fn chi2_p(stat: f64, df: f64) -> f64 {
    let chi2 = ChiSquared::new(df).expect("positive df");
    (1.0 - chi2.cdf(stat)).clamp(0.0, 1.0)
}

/// Builds the design matrix for a spec, intercept first.
fn build_design(spec: &RegressionSpec) -> Result<(DMatrix<f64>, Vec<String>)> {
    let n = spec.response.len();
    for reg in &spec.regressors {
        if reg.values.len() != n {
            return Err(Error::LengthMismatch {
                left_name: spec.response_name.clone(),
                left: n,
                right_name: reg.name.clone(),
                right: reg.values.len(),
            });
        }
    }
    let k = spec.regressors.len() + usize::from(spec.include_intercept);
    if k == 0 {
        return Err(Error::InvalidInput(
            "regression needs an intercept or at least one regressor".into(),
        ));
    }
    let mut names = Vec::with_capacity(k);
    let mut design = DMatrix::zeros(n, k);
    let mut col = 0;
    if spec.include_intercept {
        names.push("intercept".to_string());
        design.column_mut(0).fill(1.0);
        col = 1;
    }
    for reg in &spec.regressors {
        names.push(reg.name.clone());
        for (i, &v) in reg.values.iter().enumerate() {
            design[(i, col)] = v;
        }
        col += 1;
    }
    Ok((design, names))
}

/// Estimates the spec by least squares on an orthogonal factorization.
///
/// Fails with [`Error::SingularDesign`] naming the dependent columns when
/// the design is rank deficient, and with [`Error::InsufficientData`]
/// when `n <= k`.
pub fn fit_ols(spec: &RegressionSpec) -> Result<RegressionFit> {
    let (design, names) = build_design(spec)?;
    let n = design.nrows();
    let k = design.ncols();
    if n <= k {
        return Err(Error::InsufficientData { required: k + 1, found: n });
    }

    let y = DVector::from_column_slice(&spec.response);
    let ls = linalg::solve_least_squares(&design, &y).map_err(|deficiency| {
        Error::SingularDesign {
            columns: deficiency
                .dependent_columns
                .iter()
                .map(|&j| names[j].clone())
                .collect(),
        }
    })?;

    let fitted_vec = &design * &ls.coefficients;
    let fitted: Vec<f64> = fitted_vec.iter().cloned().collect();
    let residuals: Vec<f64> = spec
        .response
        .iter()
        .zip(&fitted)
        .map(|(yi, fi)| yi - fi)
        .collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2_ml = ssr / n as f64;

    let s2 = ssr / (n - k) as f64;
    let classical_cov = linalg::symmetrize(&ls.xtx_inverse * s2);
    let robust_cov = sandwich(&design, &residuals, &ls.xtx_inverse, HcVariant::Hc0);

    Ok(RegressionFit {
        names,
        coefficients: ls.coefficients.iter().cloned().collect(),
        residuals,
        fitted,
        response: spec.response.clone(),
        sigma2_ml,
        classical_cov,
        robust_cov,
        n,
        k,
        include_intercept: spec.include_intercept,
        design,
    })
}

fn xtx_inverse(design: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let y = DVector::zeros(design.nrows());
    linalg::solve_least_squares(design, &y)
        .map(|ls| ls.xtx_inverse)
        .map_err(|_| Error::SingularDesign { columns: vec!["<design>".into()] })
}

fn sandwich(
    design: &DMatrix<f64>,
    residuals: &[f64],
    xtx_inv: &DMatrix<f64>,
    variant: HcVariant,
) -> DMatrix<f64> {
    let (n, k) = design.shape();
    let mut meat = DMatrix::zeros(k, k);
    for i in 0..n {
        let e2 = residuals[i] * residuals[i];
        let row = design.row(i);
        for a in 0..k {
            for b in 0..k {
                meat[(a, b)] += e2 * row[a] * row[b];
            }
        }
    }
    let mut cov = xtx_inv * meat * xtx_inv;
    if variant == HcVariant::Hc1 {
        cov *= n as f64 / (n - k) as f64;
    }
    linalg::symmetrize(cov)
}

/// Classical homoskedastic covariance `s^2 (X'X)^{-1}` with
/// `s^2 = sum(e^2) / (n - k)`.
pub fn classical_covariance(fit: &RegressionFit) -> Result<DMatrix<f64>> {
    let s2 = fit.ssr() / (fit.n - fit.k) as f64;
    Ok(linalg::symmetrize(xtx_inverse(&fit.design)? * s2))
}

/// White sandwich covariance `(X'X)^{-1} X' diag(e^2) X (X'X)^{-1}`.
pub fn white_covariance(fit: &RegressionFit, variant: HcVariant) -> Result<DMatrix<f64>> {
    let xtx_inv = xtx_inverse(&fit.design)?;
    Ok(sandwich(&fit.design, &fit.residuals, &xtx_inv, variant))
}

/// Centered R-squared of an auxiliary regression, with a guard that maps
/// a variance-free response to zero instead of amplifying rounding dust.
fn aux_r2_centered(response: &DVector<f64>, residual_ss: f64) -> f64 {
    let n = response.len() as f64;
    let mean = response.iter().sum::<f64>() / n;
    let sst: f64 = response.iter().map(|v| (v - mean) * (v - mean)).sum();
    let uncentered: f64 = response.iter().map(|v| v * v).sum();
    if sst <= 1e-20 * uncentered.max(f64::MIN_POSITIVE) {
        return 0.0;
    }
    (1.0 - residual_ss / sst).clamp(0.0, 1.0)
}

/// White's heteroskedasticity test: `n * R^2` from regressing squared
/// residuals on the regressors, their squares and (optionally) their
/// cross products, referred to chi-square with one degree of freedom per
/// auxiliary term.
pub fn white_test(fit: &RegressionFit, cross_terms: bool) -> Result<TestResult> {
    let base_cols: Vec<usize> = (0..fit.k)
        .filter(|&j| !(fit.include_intercept && j == 0))
        .collect();
    let m = base_cols.len();
    if m == 0 {
        return Err(Error::DegenerateAuxiliary {
            test: "white",
            reason: "no regressors beyond the intercept".into(),
        });
    }

    let n = fit.n;
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for &j in &base_cols {
        let name = fit.names[j].clone();
        let z: Vec<f64> = (0..n).map(|i| fit.design[(i, j)]).collect();
        columns.push((name, z));
    }
    for &j in &base_cols {
        let name = format!("{}^2", fit.names[j]);
        let z: Vec<f64> = (0..n).map(|i| fit.design[(i, j)].powi(2)).collect();
        columns.push((name, z));
    }
    if cross_terms {
        for (a_pos, &a) in base_cols.iter().enumerate() {
            for &b in base_cols.iter().skip(a_pos + 1) {
                let name = format!("{}*{}", fit.names[a], fit.names[b]);
                let z: Vec<f64> = (0..n).map(|i| fit.design[(i, a)] * fit.design[(i, b)]).collect();
                columns.push((name, z));
            }
        }
    }

    let p_aux = columns.len() + 1;
    if n <= p_aux {
        return Err(Error::DegenerateAuxiliary {
            test: "white",
            reason: format!("{n} observations cannot support {p_aux} auxiliary parameters"),
        });
    }

    let mut aux = DMatrix::zeros(n, p_aux);
    aux.column_mut(0).fill(1.0);
    for (c, (_, z)) in columns.iter().enumerate() {
        for (i, &v) in z.iter().enumerate() {
            aux[(i, c + 1)] = v;
        }
    }
    let e2 = DVector::from_iterator(n, fit.residuals.iter().map(|e| e * e));

    let ls = linalg::solve_least_squares(&aux, &e2).map_err(|deficiency| {
        let names: Vec<String> = deficiency
            .dependent_columns
            .iter()
            .map(|&j| {
                if j == 0 {
                    "intercept".to_string()
                } else {
                    columns[j - 1].0.clone()
                }
            })
            .collect();
        Error::DegenerateAuxiliary {
            test: "white",
            reason: format!("auxiliary columns [{}] are linearly dependent", names.join(", ")),
        }
    })?;

    let fitted = &aux * &ls.coefficients;
    let residual_ss: f64 = e2
        .iter()
        .zip(fitted.iter())
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    let r2 = aux_r2_centered(&e2, residual_ss);
    let stat = n as f64 * r2;
    let df = (p_aux - 1) as f64;
    Ok(TestResult::new(
        "white",
        stat,
        TestDistribution::ChiSquared { df },
        chi2_p(stat, df),
    ))
}

/// Breusch-Godfrey LM test for serial correlation up to the given order:
/// residuals are regressed on the original design plus `order` of their
/// own lags (zero-filled at the start), giving `n * R^2` against
/// chi-square with `order` degrees of freedom.
///
/// The R-squared is taken about zero; for a design with intercept the
/// residuals have zero mean, so this agrees with the centered convention
/// while staying defined for synthetic residual vectors.
pub fn serial_correlation_test(fit: &RegressionFit, order: usize) -> Result<TestResult> {
    if order < 1 {
        return Err(Error::InvalidInput("serial correlation order must be >= 1".into()));
    }
    let n = fit.n;
    if n <= fit.k + order {
        return Err(Error::InsufficientData {
            required: fit.k + order + 1,
            found: n,
        });
    }

    let e = &fit.residuals;
    let total_ss: f64 = e.iter().map(|v| v * v).sum();
    if total_ss <= 0.0 {
        return Err(Error::DegenerateAuxiliary {
            test: "breusch_godfrey",
            reason: "residuals are identically zero".into(),
        });
    }

    let p_aux = fit.k + order;
    let mut aux = DMatrix::zeros(n, p_aux);
    aux.view_mut((0, 0), (n, fit.k)).copy_from(&fit.design);
    for lag in 1..=order {
        for i in lag..n {
            aux[(i, fit.k + lag - 1)] = e[i - lag];
        }
    }
    let response = DVector::from_column_slice(e);

    let ls = linalg::solve_least_squares(&aux, &response).map_err(|_| Error::DegenerateAuxiliary {
        test: "breusch_godfrey",
        reason: "augmented design is rank deficient".into(),
    })?;

    let fitted = &aux * &ls.coefficients;
    let residual_ss: f64 = response
        .iter()
        .zip(fitted.iter())
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    let r2 = (1.0 - residual_ss / total_ss).clamp(0.0, 1.0);
    let stat = n as f64 * r2;
    let df = order as f64;
    Ok(TestResult::new(
        "breusch_godfrey",
        stat,
        TestDistribution::ChiSquared { df },
        chi2_p(stat, df),
    ))
}

/// Durbin-Watson statistic `sum((e_t - e_{t-1})^2) / sum(e_t^2)`.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientData { required: 2, found: residuals.len() });
    }
    let denom: f64 = residuals.iter().map(|e| e * e).sum();
    if denom <= 0.0 {
        return Err(Error::degenerate_unnamed(
            "Durbin-Watson is undefined for all-zero residuals",
        ));
    }
    let numer: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(numer / denom)
}

/// R-squared, adjusted R-squared, Gaussian log-likelihood, overall F test
/// and per-observation AIC for a fit with intercept.
pub fn fit_metrics(fit: &RegressionFit) -> Result<FitMetrics> {
    if !fit.include_intercept {
        return Err(Error::InvalidInput(
            "fit metrics require a regression with intercept".into(),
        ));
    }
    if fit.k < 2 {
        return Err(Error::InvalidInput(
            "the F statistic requires at least one regressor beyond the intercept".into(),
        ));
    }
    let n = fit.n as f64;
    let k = fit.k as f64;

    let mean_y = fit.response.iter().sum::<f64>() / n;
    let sst: f64 = fit.response.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let uncentered: f64 = fit.response.iter().map(|y| y * y).sum();
    if sst <= 1e-20 * uncentered.max(f64::MIN_POSITIVE) {
        return Err(Error::degenerate_unnamed(
            "response has no variation: R-squared is undefined",
        ));
    }
    let ssr = fit.ssr();

    let df_num = k - 1.0;
    let df_den = n - k;
    if ssr <= 1e-24 * sst {
        // Numerically perfect fit: overflow-flagged maxima.
        let f_stat = TestResult::new(
            "f_statistic",
            f64::MAX,
            TestDistribution::FisherF { df_num, df_den },
            0.0,
        );
        return Ok(FitMetrics {
            r2: 1.0,
            adj_r2: 1.0,
            log_likelihood: f64::MAX,
            f_stat,
            aic: -f64::MAX,
        });
    }

    let r2 = 1.0 - ssr / sst;
    let adj_r2 = 1.0 - (1.0 - r2) * (n - 1.0) / (n - k);
    let log_likelihood = -(n / 2.0) * (1.0 + (2.0 * std::f64::consts::PI).ln() + (ssr / n).ln());
    let aic = (-2.0 * log_likelihood + 2.0 * k) / n;

    let f_value = (r2 / df_num) / ((1.0 - r2) / df_den);
    let f_dist = FisherSnedecor::new(df_num, df_den).expect("positive dfs");
    let p = (1.0 - f_dist.cdf(f_value)).clamp(0.0, 1.0);
    let f_stat = TestResult::new(
        "f_statistic",
        f_value,
        TestDistribution::FisherF { df_num, df_den },
        p,
    );

    Ok(FitMetrics { r2, adj_r2, log_likelihood, f_stat, aic })
}
