//! Per-trial evaluation quantities and their aggregation.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::penalty::row_l2_norms;

/// Relative Frobenius error strictly below this counts as exact recovery.
pub const EXACT_RECOVERY_THRESHOLD: f64 = 1e-3;
/// Row-norm threshold for reading a support off a ZAP estimate.
pub const DETECTION_ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub relative_error: f64,
    pub exact_recovery: bool,
    /// `‖X − X̂‖_F²`.
    pub msd: f64,
    pub detected_rows: usize,
    pub elapsed_seconds: f64,
}

impl TrialOutcome {
    pub fn evaluate(x_true: &DenseMatrix, x_hat: &DenseMatrix, zero_tol: f64, elapsed_seconds: f64) -> Result<Self> {
        let relative_error = relative_error(x_true, x_hat)?;
        Ok(Self {
            relative_error,
            exact_recovery: is_exact_recovery(relative_error),
            msd: x_true.sub(x_hat)?.frobenius_norm().powi(2),
            detected_rows: support_detection(x_true, x_hat, zero_tol)?,
            elapsed_seconds,
        })
    }
}

/// `‖X − X̂‖_F / ‖X‖_F`.
pub fn relative_error(x_true: &DenseMatrix, x_hat: &DenseMatrix) -> Result<f64> {
    let diff = x_true.sub(x_hat)?;
    let scale = x_true.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    Ok(diff.frobenius_norm() / scale)
}

pub fn is_exact_recovery(relative_error: f64) -> bool {
    relative_error < EXACT_RECOVERY_THRESHOLD
}

/// Number of true support rows whose estimated row norm also exceeds `zero_tol`.
pub fn support_detection(x_true: &DenseMatrix, x_hat: &DenseMatrix, zero_tol: f64) -> Result<usize> {
    if x_true.rows() != x_hat.rows() {
        return Err(x_true.mismatch("support_detection", x_hat));
    }
    Ok(row_l2_norms(x_true)
        .into_iter()
        .zip(row_l2_norms(x_hat))
        .filter(|&(t, h)| t > zero_tol && h > zero_tol)
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub recovery_probability: f64,
    pub mean_relative_error: f64,
    pub mean_msd: f64,
    pub mean_time: f64,
    pub trial_count: usize,
}

/// Success fraction and arithmetic means.
///
/// Values are sorted before summation so the result does not depend on the
/// order of `outcomes`, bit for bit.
pub fn aggregate(outcomes: &[TrialOutcome]) -> Result<Summary> {
    if outcomes.is_empty() {
        return Err(Error::EmptyAggregation);
    }
    let count = outcomes.len() as f64;
    let mean = |f: fn(&TrialOutcome) -> f64| {
        let mut v: Vec<f64> = outcomes.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>() / count
    };
    let successes = outcomes.iter().filter(|o| o.exact_recovery).count();
    Ok(Summary {
        recovery_probability: successes as f64 / count,
        mean_relative_error: mean(|o| o.relative_error),
        mean_msd: mean(|o| o.msd),
        mean_time: mean(|o| o.elapsed_seconds),
        trial_count: outcomes.len(),
    })
}

/// `10 log10(v)`.
pub fn to_db(v: f64) -> f64 {
    10.0 * v.log10()
}
