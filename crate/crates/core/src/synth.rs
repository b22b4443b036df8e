//! Seeded synthetic linkage datasets for tests, benchmarks and
//! simulation runs.
//!
//! The generating process mirrors the estimated model: oil returns are
//! i.i.d. Gaussian, world returns load on oil plus independent noise, and
//! each country loads on that world noise and on oil with its own
//! disturbance. All draws come from a counter-seeded ChaCha stream, so a
//! given `(seed, countries, params)` triple always produces the same
//! bundle on every platform.

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::pipeline::AlignedBundle;
use crate::series::{ReturnMode, ReturnSeries};

/// Parameters of the synthetic generating process.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Number of return observations per series.
    pub n_returns: usize,
    /// Intercept of the world-on-oil relation.
    pub world_alpha: f64,
    /// Oil exposure of world returns.
    pub world_beta: f64,
    /// Country equation intercept.
    pub country_intercept: f64,
    /// Country loading on the non-oil world component.
    pub world_loading: f64,
    /// Country loading on oil returns (the planted linkage).
    pub oil_loading: f64,
    pub oil_sd: f64,
    pub world_noise_sd: f64,
    pub country_noise_sd: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_returns: 176,
            world_alpha: 0.001,
            world_beta: 0.4,
            country_intercept: 0.0005,
            world_loading: 0.25,
            oil_loading: 0.3,
            oil_sd: 0.035,
            world_noise_sd: 0.012,
            country_noise_sd: 0.02,
        }
    }
}

/// Weekly dates for `n` return observations.
pub fn weekly_dates(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2005, 6, 10).expect("valid date");
    (0..n)
        .map(|i| start + chrono::Duration::weeks(i as i64))
        .collect()
}

/// Generates an aligned bundle with the planted oil loading for every
/// listed country.
pub fn linkage_bundle(seed: u64, countries: &[&str], params: &SynthParams) -> AlignedBundle {
    let n = params.n_returns;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oil_noise = Normal::new(0.0, params.oil_sd).expect("positive sd");
    let world_noise = Normal::new(0.0, params.world_noise_sd).expect("positive sd");
    let country_noise = Normal::new(0.0, params.country_noise_sd).expect("positive sd");

    let oil: Vec<f64> = (0..n).map(|_| oil_noise.sample(&mut rng)).collect();
    let v: Vec<f64> = (0..n).map(|_| world_noise.sample(&mut rng)).collect();
    let world: Vec<f64> = (0..n)
        .map(|i| params.world_alpha + params.world_beta * oil[i] + v[i])
        .collect();

    let dates = weekly_dates(n);
    let series = |name: &str, values: Vec<f64>| ReturnSeries {
        name: name.to_string(),
        dates: dates.clone(),
        values,
        mode: ReturnMode::Log,
    };

    let country_series: Vec<ReturnSeries> = countries
        .iter()
        .map(|name| {
            let values: Vec<f64> = (0..n)
                .map(|i| {
                    params.country_intercept
                        + params.world_loading * v[i]
                        + params.oil_loading * oil[i]
                        + country_noise.sample(&mut rng)
                })
                .collect();
            series(name, values)
        })
        .collect();

    AlignedBundle {
        oil: series("opec", oil),
        world: series("world", world),
        countries: country_series,
        dropped_rows: 0,
        aligned_rows: n + 1,
        input: None,
        timestamp: None,
    }
}
