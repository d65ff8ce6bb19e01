//! Brute-force ground truth for small instances: exhaustive support search,
//! spark, and the spark/rank uniqueness bound
//! `K < (spark(A) + rank(Y) − 1) / 2`.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::decomp::{least_squares, numerical_rank};
use crate::linalg::DenseMatrix;

/// Largest number of candidate supports the exhaustive search will visit.
pub const MAX_SUPPORTS: u128 = 1_000_000;
/// Largest column count accepted by [`spark`].
pub const MAX_SPARK_COLUMNS: usize = 20;
/// Singular values at or below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessReport {
    pub spark: usize,
    pub rank_y: usize,
    pub bound: f64,
    pub k: usize,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub solution: DenseMatrix,
    pub support: Vec<usize>,
    pub residual_norm: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Least squares fit of `y` on every size-`k` column subset; returns the
/// residual-minimal one embedded as an `n x l` matrix. Ties (and exact fits
/// found later) keep the lexicographically smallest support. Subsets whose
/// columns are numerically dependent are skipped.
pub fn exhaustive_solve(a: &DenseMatrix, y: &DenseMatrix, k: usize) -> Result<OracleSolution> {
    let (m, n) = a.shape();
    if y.rows() != m {
        return Err(a.mismatch("exhaustive_solve", y));
    }
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!(
            "oracle needs 1 <= k <= m, got k={k} m={m}"
        )));
    }
    let count = binomial(n, k);
    if count > MAX_SUPPORTS {
        return Err(Error::OracleTooLarge {
            detail: format!("C({n}, {k}) = {count} supports exceeds {MAX_SUPPORTS}; reduce n or k"),
        });
    }

    let mut best: Option<(Vec<usize>, DenseMatrix, f64)> = None;
    for support in (0..n).combinations(k) {
        let sub = a.select_columns(&support);
        let Some(fit) = least_squares(&sub, y) else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, _, r)| fit.residual_norm < *r) {
            best = Some((support, fit.coefficients, fit.residual_norm));
        }
    }
    let (support, coef, residual_norm) = best.ok_or_else(|| Error::DegenerateSupport {
        support: (0..k).collect(),
    })?;
    Ok(OracleSolution {
        solution: DenseMatrix::embed_rows(n, &support, &coef),
        support,
        residual_norm,
    })
}

/// Smallest number of numerically dependent columns; `n + 1` when every
/// subset that could be independent is.
pub fn spark(a: &DenseMatrix) -> Result<usize> {
    let (m, n) = a.shape();
    if n > MAX_SPARK_COLUMNS {
        return Err(Error::SparkTooLarge {
            cols: n,
            limit: MAX_SPARK_COLUMNS,
        });
    }
    // Any m + 1 columns in R^m are dependent.
    for size in 1..=n.min(m) {
        for subset in (0..n).combinations(size) {
            if numerical_rank(&a.select_columns(&subset), RANK_TOL) < size {
                return Ok(size);
            }
        }
    }
    Ok(if n > m { m + 1 } else { n + 1 })
}

pub fn uniqueness_check(a: &DenseMatrix, y: &DenseMatrix, k: usize) -> Result<UniquenessReport> {
    if y.rows() != a.rows() {
        return Err(a.mismatch("uniqueness_check", y));
    }
    let spark = spark(a)?;
    let rank_y = numerical_rank(y, RANK_TOL);
    let bound = (spark as f64 + rank_y as f64 - 1.0) / 2.0;
    Ok(UniquenessReport {
        spark,
        rank_y,
        bound,
        k,
        unique: (k as f64) < bound,
    })
}
