//! Error type shared by all analysis stages.

use thiserror::Error;

/// Errors produced by series construction, estimation and smoothing.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Too few observations for the requested operation.
    #[error("insufficient data: need at least {required} observations, found {found}")]
    InsufficientData { required: usize, found: usize },

    /// A price level that is zero or negative.
    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    /// A series without enough variation to support the computation.
    #[error("degenerate series{}: {reason}", name.as_deref().map(|n| format!(" '{n}'")).unwrap_or_default())]
    DegenerateSeries { name: Option<String>, reason: String },

    /// The design matrix does not have full column rank.
    #[error("singular design: columns [{}] are linearly dependent", columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    /// An auxiliary test regression could not be formed or solved.
    #[error("degenerate auxiliary design for {test}: {reason}")]
    DegenerateAuxiliary { test: &'static str, reason: String },

    /// The regressor has zero range, so a range-based bandwidth is undefined.
    #[error("zero-range regressor: all values equal {value}")]
    ZeroRange { value: f64 },

    /// A local polynomial system could not be solved at one grid abscissa.
    #[error("local fit failed at x = {x}: {reason}")]
    LocalSingularity { x: f64, reason: String },

    /// Paired inputs of unequal length.
    #[error("length mismatch between {left_name} ({left}) and {right_name} ({right})")]
    LengthMismatch {
        left_name: String,
        left: usize,
        right_name: String,
        right: usize,
    },

    /// Series whose dates do not coincide observation by observation.
    #[error("misaligned dates between '{left}' and '{right}': {reason}")]
    MisalignedDates {
        left: String,
        right: String,
        reason: String,
    },

    /// Any other violated precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn degenerate(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::DegenerateSeries {
            name: Some(name.into()),
            reason: reason.into(),
        }
    }

    pub(crate) fn degenerate_unnamed(reason: impl Into<String>) -> Self {
        Error::DegenerateSeries {
            name: None,
            reason: reason.into(),
        }
    }

    /// True for errors caused by numerical degeneracy of the data rather
    /// than by malformed input. The CLI maps these to a dedicated exit code.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSeries { .. }
                | Error::SingularDesign { .. }
                | Error::DegenerateAuxiliary { .. }
                | Error::ZeroRange { .. }
                | Error::LocalSingularity { .. }
        )
    }
}
