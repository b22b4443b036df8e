//! Order-2 local polynomial kernel regression on an evaluation grid.
//!
//! At each grid abscissa `x` the response is fit by weighted least squares
//! on the basis `{1, (x - X_i), (x - X_i)^2}` with kernel weights
//! `K((x - X_i) / h)`, so `beta0` is the smoothed curve value at `x`. A
//! global straight-line fit of the same sample is attached for overlay
//! plots.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg;
use crate::Result;

/// Default bandwidth factor applied to the regressor range.
pub const DEFAULT_BANDWIDTH_FACTOR: f64 = 0.15;

/// Share of the midpoint kernel mass below which a grid point is flagged
/// as an edge point with low effective sample.
const EDGE_MASS_SHARE: f64 = 0.05;

/// Weighting function shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Gaussian,
    Epanechnikov,
    Uniform,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::Gaussian => write!(f, "gaussian"),
            KernelKind::Epanechnikov => write!(f, "epanechnikov"),
            KernelKind::Uniform => write!(f, "uniform"),
        }
    }
}

/// Either a fixed bandwidth or a factor applied to the regressor range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Fixed(f64),
    FactorOfRange(f64),
}

/// Kernel shape plus bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: Bandwidth,
}

impl Default for KernelSpec {
    /// Gaussian kernel with bandwidth `0.15 * range`.
    fn default() -> Self {
        KernelSpec {
            kind: KernelKind::Gaussian,
            bandwidth: Bandwidth::FactorOfRange(DEFAULT_BANDWIDTH_FACTOR),
        }
    }
}

impl KernelSpec {
    /// The concrete bandwidth for a sample of regressor values.
    pub fn resolve_bandwidth(&self, x_values: &[f64]) -> Result<f64> {
        let h = match self.bandwidth {
            Bandwidth::Fixed(h) => h,
            Bandwidth::FactorOfRange(factor) => {
                if !(factor > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "bandwidth factor must be positive, got {factor}"
                    )));
                }
                factor * range_of(x_values)?
            }
        };
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bandwidth must be positive and finite, got {h}"
            )));
        }
        Ok(h)
    }
}

fn range_of(x_values: &[f64]) -> Result<f64> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in x_values {
        min = min.min(v);
        max = max.max(v);
    }
    if x_values.len() < 2 || !(max > min) {
        return Err(Error::ZeroRange {
            value: if x_values.is_empty() { f64::NAN } else { min },
        });
    }
    Ok(max - min)
}

/// Bandwidth rule `0.15 * (max - min)` over the regressor values.
pub fn default_bandwidth(x_values: &[f64]) -> Result<f64> {
    Ok(DEFAULT_BANDWIDTH_FACTOR * range_of(x_values)?)
}

/// Kernel weight at standardized distance `w`. All three kernels
/// integrate to one; the Gaussian is strictly positive everywhere while
/// the other two have support `|w| <= 1`.
pub fn kernel_weight(w: f64, kind: KernelKind) -> f64 {
    match kind {
        KernelKind::Gaussian => (-0.5 * w * w).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        KernelKind::Epanechnikov => {
            if w.abs() <= 1.0 {
                0.75 * (1.0 - w * w)
            } else {
                0.0
            }
        }
        KernelKind::Uniform => {
            if w.abs() <= 1.0 {
                0.5
            } else {
                0.0
            }
        }
    }
}

/// One local fit: curve height `beta0`, local slope and curvature terms on
/// the `(x - X_i)` basis, and the kernel mass that supported the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFitPoint {
    pub x: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub weight_mass: f64,
}

/// Intercept and slope of the global straight-line fit used as overlay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearOverlay {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearOverlay {
    pub fn value_at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// A grid abscissa dropped by the flag-and-skip policy, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub x: f64,
    pub reason: String,
}

/// The smoothed curve over the evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCurve {
    /// Successful local fits, abscissas strictly increasing.
    pub points: Vec<LocalFitPoint>,
    /// Parallel to `points`: true where the kernel mass fell below
    /// [`EDGE_MASS_SHARE`] of the mass at the range midpoint.
    pub edge_flags: Vec<bool>,
    /// Grid abscissas whose local system was singular or unsupported.
    pub skipped: Vec<SkippedPoint>,
    pub spec: KernelSpec,
    /// The resolved bandwidth actually used.
    pub bandwidth: f64,
    pub grid_size: usize,
    pub linear_overlay: LinearOverlay,
}

fn local_fit_at(
    x: f64,
    xs: &[f64],
    ys: &[f64],
    kind: KernelKind,
    h: f64,
) -> Result<LocalFitPoint> {
    let t = xs.len();
    let weights: Vec<f64> = xs.iter().map(|&xi| kernel_weight((x - xi) / h, kind)).collect();
    let weight_mass: f64 = weights.iter().sum();
    if !(weight_mass > 0.0) {
        return Err(Error::LocalSingularity {
            x,
            reason: "all kernel weights vanished".into(),
        });
    }

    let mut support: Vec<f64> = xs
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&xi, _)| xi)
        .collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    if support.len() < 3 {
        return Err(Error::LocalSingularity {
            x,
            reason: format!(
                "only {} distinct support point(s) carry weight",
                support.len()
            ),
        });
    }

    let mut design = DMatrix::zeros(t, 3);
    let mut response = DVector::zeros(t);
    for i in 0..t {
        let sw = weights[i].sqrt();
        let d = x - xs[i];
        design[(i, 0)] = sw;
        design[(i, 1)] = sw * d;
        design[(i, 2)] = sw * d * d;
        response[i] = sw * ys[i];
    }

    let ls = linalg::solve_least_squares(&design, &response).map_err(|_| {
        Error::LocalSingularity {
            x,
            reason: "weighted local system is rank deficient".into(),
        }
    })?;
    let beta = &ls.coefficients;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::LocalSingularity {
            x,
            reason: "local coefficients are not finite".into(),
        });
    }

    Ok(LocalFitPoint {
        x,
        beta0: beta[0],
        beta1: beta[1],
        beta2: beta[2],
        weight_mass,
    })
}

/// One local polynomial fit at abscissa `x`, weighting `(X, Y)` with the
/// spec's kernel and bandwidth.
pub fn local_poly_fit(x: f64, xs: &[f64], ys: &[f64], spec: &KernelSpec) -> Result<LocalFitPoint> {
    check_sample(xs, ys)?;
    let h = spec.resolve_bandwidth(xs)?;
    local_fit_at(x, xs, ys, spec.kind, h)
}

fn check_sample(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left_name: "x".into(),
            left: xs.len(),
            right_name: "y".into(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData { required: 3, found: xs.len() });
    }
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("sample contains non-finite values".into()));
    }
    Ok(())
}

/// Fits the smooth curve on an equally spaced grid spanning the regressor
/// range, attaching the global linear overlay and per-point edge flags.
///
/// Grid points whose local system cannot be solved are recorded in
/// `skipped` and omitted from `points`; with a Gaussian kernel this does
/// not happen at usual bandwidths. The sample is canonically reordered
/// before any summation, so the output is identical for any permutation
/// of the input pairs.
pub fn fit_curve(
    xs: &[f64],
    ys: &[f64],
    spec: &KernelSpec,
    grid_size: usize,
) -> Result<KernelCurve> {
    check_sample(xs, ys)?;
    if grid_size < 2 {
        return Err(Error::InvalidInput(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }

    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));
    let sx: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let sy: Vec<f64> = order.iter().map(|&i| ys[i]).collect();

    let x_low = sx[0];
    let x_high = sx[sx.len() - 1];
    if !(x_high > x_low) {
        return Err(Error::ZeroRange { value: x_low });
    }
    let h = spec.resolve_bandwidth(&sx)?;

    let step = (x_high - x_low) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size)
        .map(|j| {
            if j + 1 == grid_size {
                x_high
            } else {
                x_low + j as f64 * step
            }
        })
        .collect();

    let midpoint = 0.5 * (x_low + x_high);
    let midpoint_mass: f64 = sx
        .iter()
        .map(|&xi| kernel_weight((midpoint - xi) / h, spec.kind))
        .sum();
    let edge_threshold = EDGE_MASS_SHARE * midpoint_mass;

    let fits: Vec<Result<LocalFitPoint>> = grid
        .par_iter()
        .map(|&x| local_fit_at(x, &sx, &sy, spec.kind, h))
        .collect();

    let mut points = Vec::with_capacity(grid_size);
    let mut edge_flags = Vec::with_capacity(grid_size);
    let mut skipped = Vec::new();
    for fit in fits {
        match fit {
            Ok(point) => {
                edge_flags.push(point.weight_mass < edge_threshold);
                points.push(point);
            }
            Err(Error::LocalSingularity { x, reason }) => {
                skipped.push(SkippedPoint { x, reason });
            }
            Err(other) => return Err(other),
        }
    }

    let linear_overlay = global_line(&sx, &sy)?;

    Ok(KernelCurve {
        points,
        edge_flags,
        skipped,
        spec: *spec,
        bandwidth: h,
        grid_size,
        linear_overlay,
    })
}

fn global_line(xs: &[f64], ys: &[f64]) -> Result<LinearOverlay> {
    let n = xs.len();
    let mut design = DMatrix::zeros(n, 2);
    let mut response = DVector::zeros(n);
    for i in 0..n {
        design[(i, 0)] = 1.0;
        design[(i, 1)] = xs[i];
        response[i] = ys[i];
    }
    let ls = linalg::solve_least_squares(&design, &response).map_err(|_| Error::SingularDesign {
        columns: vec!["intercept".into(), "x".into()],
    })?;
    Ok(LinearOverlay {
        intercept: ls.coefficients[0],
        slope: ls.coefficients[1],
    })
}
