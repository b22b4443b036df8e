//! Descriptive statistics and the Jarque-Bera normality test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::Error;
use crate::series::ReturnSeries;
use crate::Result;

/// Reference distribution of a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestDistribution {
    ChiSquared { df: f64 },
    FisherF { df_num: f64, df_den: f64 },
    StudentT { df: f64 },
}

/// A named diagnostic statistic with its reference distribution, p-value
/// and significance stars (1/2/3 for rejection at 10%/5%/1%).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub stat: f64,
    pub distribution: TestDistribution,
    pub p_value: f64,
    pub stars: u8,
    pub stars_label: String,
}

impl TestResult {
    pub fn new(name: impl Into<String>, stat: f64, distribution: TestDistribution, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        let stars = stars_from_p(p_value);
        TestResult {
            name: name.into(),
            stat,
            distribution,
            p_value,
            stars,
            stars_label: stars_label(stars).to_string(),
        }
    }
}

/// Star count for a p-value at the 10%/5%/1% thresholds.
pub fn stars_from_p(p: f64) -> u8 {
    if p < 0.01 {
        3
    } else if p < 0.05 {
        2
    } else if p < 0.10 {
        1
    } else {
        0
    }
}

/// Conventional star rendering as used in result tables.
pub fn stars_label(stars: u8) -> &'static str {
    match stars {
        0 => "",
        1 => "*",
        2 => "**",
        _ => "***",
    }
}

/// Summary moments of a return series. `kurtosis` is the raw fourth
/// standardized moment (3 for a normal distribution, not excess), computed
/// with n-divisor central moments; `std_dev` uses the (n-1)-divisor sample
/// formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub jarque_bera: TestResult,
}

/// Computes the descriptive-statistics row for one return series.
pub fn describe(returns: &ReturnSeries) -> Result<DescriptiveStats> {
    let x = &returns.values;
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientData { required: 4, found: n });
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let ss = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    // Guard against rounding dust masquerading as variance when the
    // series is constant up to representation error.
    let scale2 = x.iter().map(|v| v * v).fold(0.0_f64, f64::max);
    if m2 <= 1e-24 * scale2.max(f64::MIN_POSITIVE) {
        return Err(Error::degenerate(
            &returns.name,
            "constant series: skewness and kurtosis are undefined",
        ));
    }

    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let std_dev = (ss / (nf - 1.0)).sqrt();

    Ok(DescriptiveStats {
        n,
        mean,
        std_dev,
        skewness,
        kurtosis,
        jarque_bera: jarque_bera(skewness, kurtosis, n)?,
    })
}

/// Jarque-Bera statistic `(n/6) * (S^2 + (K-3)^2 / 4)` with `K` the raw
/// kurtosis, referred to a chi-square distribution with 2 degrees of
/// freedom.
pub fn jarque_bera(skewness: f64, kurtosis: f64, n: usize) -> Result<TestResult> {
    if n < 4 {
        return Err(Error::InsufficientData { required: 4, found: n });
    }
    let excess = kurtosis - 3.0;
    let stat = (n as f64 / 6.0) * (skewness * skewness + excess * excess / 4.0);
    let chi2 = ChiSquared::new(2.0).expect("df 2 is valid");
    let p_value = 1.0 - chi2.cdf(stat);
    Ok(TestResult::new(
        "jarque_bera",
        stat,
        TestDistribution::ChiSquared { df: 2.0 },
        p_value,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ReturnMode;
    use approx::assert_relative_eq;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn series(values: &[f64]) -> ReturnSeries {
        let start = NaiveDate::from_ymd_opt(2005, 6, 10).unwrap();
        ReturnSeries {
            name: "r".into(),
            dates: (0..values.len())
                .map(|i| start + chrono::Duration::weeks(i as i64))
                .collect(),
            values: values.to_vec(),
            mode: ReturnMode::Log,
        }
    }

    #[test]
    fn symmetric_series_has_zero_skewness() {
        let d = describe(&series(&[-1.0, 0.0, 1.0, -1.0, 0.0, 1.0])).unwrap();
        assert_relative_eq!(d.skewness, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn two_point_series_attains_minimum_kurtosis() {
        let d = describe(&series(&[-1.0, 1.0, -1.0, 1.0])).unwrap();
        assert_relative_eq!(d.kurtosis, 1.0, epsilon = 1e-14);
        assert_relative_eq!(d.skewness, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn shift_leaves_shape_statistics_unchanged() {
        let base = [0.012, -0.03, 0.007, 0.051, -0.019, 0.001, 0.023];
        let shifted: Vec<f64> = base.iter().map(|v| v + 0.4).collect();
        let a = describe(&series(&base)).unwrap();
        let b = describe(&series(&shifted)).unwrap();
        assert_relative_eq!(a.skewness, b.skewness, epsilon = 1e-10);
        assert_relative_eq!(a.kurtosis, b.kurtosis, epsilon = 1e-10);
    }

    #[test]
    fn constant_series_is_reported_degenerate() {
        let err = describe(&series(&[0.5, 0.5, 0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::DegenerateSeries { .. }));
    }

    #[test]
    fn short_series_is_rejected() {
        let err = describe(&series(&[0.1, 0.2, 0.3])).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { required: 4, .. }));
    }

    #[test]
    fn std_dev_uses_sample_divisor() {
        let d = describe(&series(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        // sum of squares about mean 2.5 is 5, / (n-1) = 5/3
        assert_relative_eq!(d.std_dev, (5.0_f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn jarque_bera_is_zero_at_normal_moments() {
        let t = jarque_bera(0.0, 3.0, 500).unwrap();
        assert_eq!(t.stat, 0.0);
        assert_eq!(t.stars, 0);
        assert_relative_eq!(t.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jarque_bera_reproduces_published_oil_row() {
        let t = jarque_bera(-0.803, 4.693, 176).unwrap();
        assert!((t.stat - 39.93).abs() < 0.05, "stat {}", t.stat);
        assert_eq!(t.stars, 3);
    }

    #[test]
    fn jarque_bera_reproduces_published_saudi_row() {
        let t = jarque_bera(-1.113, 7.052, 176).unwrap();
        assert!((t.stat - 156.74).abs() < 0.1, "stat {}", t.stat);
        assert_eq!(t.stars, 3);
    }

    #[test]
    fn star_thresholds_are_monotone() {
        assert_eq!(stars_from_p(0.005), 3);
        assert_eq!(stars_from_p(0.03), 2);
        assert_eq!(stars_from_p(0.07), 1);
        assert_eq!(stars_from_p(0.2), 0);
        assert_eq!(stars_label(2), "**");
    }

    proptest! {
        #[test]
        fn jb_is_non_negative_and_zero_only_at_normal_moments(
            s in -5.0_f64..5.0,
            k in 0.0_f64..40.0,
            n in 4_usize..1000,
        ) {
            let t = jarque_bera(s, k, n).unwrap();
            prop_assert!(t.stat >= 0.0);
            if t.stat == 0.0 {
                prop_assert!(s == 0.0 && k == 3.0);
            }
        }

        #[test]
        fn shape_statistics_are_affine_equivariant(
            values in proptest::collection::vec(-1.0_f64..1.0, 8..40),
            shift in -2.0_f64..2.0,
            scale in 0.1_f64..10.0,
        ) {
            let base = describe(&series(&values));
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            prop_assert!(base.kurtosis >= 1.0 - 1e-9);

            let up: Vec<f64> = values.iter().map(|v| shift + scale * v).collect();
            let d = describe(&series(&up)).unwrap();
            prop_assert!((d.skewness - base.skewness).abs() < 1e-6 * (1.0 + base.skewness.abs()));
            prop_assert!((d.kurtosis - base.kurtosis).abs() < 1e-6 * (1.0 + base.kurtosis.abs()));

            let down: Vec<f64> = values.iter().map(|v| shift - scale * v).collect();
            let d = describe(&series(&down)).unwrap();
            prop_assert!((d.skewness + base.skewness).abs() < 1e-6 * (1.0 + base.skewness.abs()));
            prop_assert!((d.kurtosis - base.kurtosis).abs() < 1e-6 * (1.0 + base.kurtosis.abs()));
        }
    }
}
