//! Dated price and return series.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// How per-period returns are derived from price levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnMode {
    /// `ln(P_t / P_{t-1})`
    Log,
    /// `P_t / P_{t-1} - 1`
    Simple,
}

impl std::fmt::Display for ReturnMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReturnMode::Log => write!(f, "log"),
            ReturnMode::Simple => write!(f, "simple"),
        }
    }
}

/// A named series of strictly positive price levels on strictly
/// increasing dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl PriceSeries {
    /// Validates the series invariants: equal lengths, strictly increasing
    /// dates, strictly positive prices.
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                left_name: format!("{name}.dates"),
                left: dates.len(),
                right_name: format!("{name}.values"),
                right: values.len(),
            });
        }
        for window in dates.windows(2) {
            if window[1] <= window[0] {
                return Err(Error::InvalidInput(format!(
                    "dates of '{name}' must be strictly increasing ({} followed by {})",
                    window[0], window[1]
                )));
            }
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositivePrice { index, value });
            }
        }
        Ok(PriceSeries { name, dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A named series of per-period returns. One observation shorter than the
/// price series it was derived from; each return carries the later date of
/// its price pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    pub mode: ReturnMode,
}

impl ReturnSeries {
    pub fn new(
        name: impl Into<String>,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
        mode: ReturnMode,
    ) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch {
                left_name: format!("{name}.dates"),
                left: dates.len(),
                right_name: format!("{name}.values"),
                right: values.len(),
            });
        }
        Ok(ReturnSeries { name, dates, values, mode })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Errors unless `self` and `other` share identical date vectors.
    pub fn check_aligned(&self, other: &ReturnSeries) -> Result<()> {
        if self.dates == other.dates {
            return Ok(());
        }
        let reason = if self.dates.len() != other.dates.len() {
            format!("{} vs {} observations", self.dates.len(), other.dates.len())
        } else {
            let at = self
                .dates
                .iter()
                .zip(&other.dates)
                .position(|(a, b)| a != b)
                .unwrap_or(0);
            format!("first difference at position {at}")
        };
        Err(Error::MisalignedDates {
            left: self.name.clone(),
            right: other.name.clone(),
            reason,
        })
    }
}

/// Turns price levels into returns under the requested mode. The result
/// keeps the source name and drops the first date.
pub fn compute_returns(prices: &PriceSeries, mode: ReturnMode) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            found: prices.len(),
        });
    }
    for (index, &value) in prices.values.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonPositivePrice { index, value });
        }
    }
    let values = prices
        .values
        .windows(2)
        .map(|pair| match mode {
            ReturnMode::Log => (pair[1] / pair[0]).ln(),
            ReturnMode::Simple => pair[1] / pair[0] - 1.0,
        })
        .collect();
    ReturnSeries::new(
        prices.name.clone(),
        prices.dates[1..].to_vec(),
        values,
        mode,
    )
}
