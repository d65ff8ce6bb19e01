//! Row-sparsity measures: the exact count of nonzero rows and its continuous
//! surrogate `J(X) = Σ_i F(‖x_i‖₂)`, with
//!
//! ```text
//! F(w) = 2α|w| − α²w²   for |w| ≤ 1/α
//!        1              otherwise
//! ```
//!
//! and the subderivative `f(w) = 2α·sgn(w) − 2α²w` on the same interval (zero
//! outside, `sgn(0) = 0`).

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Row norms at or below this count as zero in [`count_nonzero_rows`] by default.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Sharpness of the surrogate; larger values approximate the row count more tightly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    alpha: f64,
}

impl PenaltyParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Radius `1/α` beyond which a row is saturated.
    pub fn saturation(&self) -> f64 {
        1.0 / self.alpha
    }
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

pub fn row_l2_norms(x: &DenseMatrix) -> Vec<f64> {
    (0..x.rows())
        .map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

/// Number of rows whose ℓ2 norm exceeds `zero_tol`.
pub fn count_nonzero_rows(x: &DenseMatrix, zero_tol: f64) -> usize {
    row_l2_norms(x).into_iter().filter(|&r| r > zero_tol).count()
}

/// The surrogate `F` evaluated at a scalar.
pub fn surrogate(w: f64, p: PenaltyParams) -> f64 {
    let t = p.alpha * w.abs();
    if t <= 1.0 {
        t * (2.0 - t)
    } else {
        1.0
    }
}

/// Subderivative `f` of the surrogate; exactly zero at `w = 0` and for `|w| > 1/α`.
pub fn surrogate_subderivative(w: f64, p: PenaltyParams) -> f64 {
    let a = p.alpha;
    if (a * w).abs() <= 1.0 {
        let sgn = if w > 0.0 {
            1.0
        } else if w < 0.0 {
            -1.0
        } else {
            0.0
        };
        2.0 * a * (sgn - a * w)
    } else {
        0.0
    }
}

/// `J(X)`, bounded above by the number of rows.
pub fn approx_penalty(x: &DenseMatrix, p: PenaltyParams) -> f64 {
    row_l2_norms(x).into_iter().map(|r| surrogate(r, p)).sum()
}

/// Gradient matrix of `J`: row `i` is `f(‖x_i‖)/‖x_i‖ · x_i`, zero for zero rows.
pub fn penalty_gradient(x: &DenseMatrix, p: PenaltyParams) -> DenseMatrix {
    let mut g = DenseMatrix::zeros(x.rows(), x.cols());
    for (i, norm) in row_l2_norms(x).into_iter().enumerate() {
        if norm == 0.0 {
            continue;
        }
        let weight = surrogate_subderivative(norm, p) / norm;
        if weight == 0.0 {
            continue;
        }
        for (gij, xij) in g.row_mut(i).iter_mut().zip(x.row(i)) {
            *gij = weight * xij;
        }
    }
    g
}
