//! Simultaneous orthogonal matching pursuit (greedy joint-support baseline).

use crate::error::{Error, Result};
use crate::linalg::decomp::least_squares;
use crate::linalg::DenseMatrix;

/// Relative residual at which noiseless runs stop adding atoms.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SompResult {
    /// `n x l`, zero outside `support`.
    pub solution: DenseMatrix,
    /// Selected columns in selection order.
    pub support: Vec<usize>,
    /// `‖R‖_F` after each accepted step.
    pub residual_norms: Vec<f64>,
}

/// Greedily selects up to `k` columns of `a`.
///
/// Each step scores column `i` by `‖a_iᵀ R‖₂ / ‖a_i‖₂` (the ℓ2 norm across
/// measurement vectors of the normalized correlation with the residual),
/// takes the best score (lowest index on ties), refits all selected
/// coefficients by least squares and updates the residual. Stops early once
/// `‖R‖_F ≤ residual_tol · ‖Y‖_F`.
pub fn somp_solve(a: &DenseMatrix, y: &DenseMatrix, k: usize, residual_tol: f64) -> Result<SompResult> {
    let (m, n) = a.shape();
    if y.rows() != m {
        return Err(a.mismatch("somp_solve", y));
    }
    if !(residual_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "residual_tol must be nonnegative, got {residual_tol}"
        )));
    }
    let column_norms: Vec<f64> = (0..n)
        .map(|j| a.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(col) = column_norms.iter().position(|&c| c == 0.0) {
        return Err(Error::ZeroColumn { col });
    }

    let y_norm = y.frobenius_norm();
    let stop_at = residual_tol * y_norm;
    let mut residual = y.clone();
    let mut residual_norm = y_norm;
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut selected = vec![false; n];
    let mut residual_norms = Vec::with_capacity(k);
    let mut coefficients: Option<DenseMatrix> = None;

    while support.len() < k && residual_norm > stop_at {
        let corr = a.transpose_matmul(&residual)?;
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !selected[i]) {
            let score = corr.row(i).iter().map(|v| v * v).sum::<f64>().sqrt() / column_norms[i];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((pick, _)) = best else { break };
        support.push(pick);
        selected[pick] = true;

        let sub = a.select_columns(&support);
        let fit = least_squares(&sub, y).ok_or_else(|| Error::DegenerateSupport {
            support: support.clone(),
        })?;
        residual = y.sub(&sub.matmul(&fit.coefficients)?)?;
        residual_norm = residual.frobenius_norm();
        residual_norms.push(residual_norm);
        coefficients = Some(fit.coefficients);
    }

    let solution = match coefficients {
        Some(c) => DenseMatrix::embed_rows(n, &support, &c),
        None => DenseMatrix::zeros(n, y.cols()),
    };
    Ok(SompResult {
        solution,
        support,
        residual_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate, GaussianStream, ProblemSize};

    #[test]
    fn zero_measurements_give_empty_support() {
        let a = GaussianStream::new(1).matrix(4, 8);
        let r = somp_solve(&a, &DenseMatrix::zeros(4, 2), 3, DEFAULT_RESIDUAL_TOL).unwrap();
        assert!(r.support.is_empty());
        assert_eq!(r.solution, DenseMatrix::zeros(8, 2));
    }

    #[test]
    fn orthogonal_design_exact_in_k_steps() {
        // Columns are scaled standard basis vectors: mutually orthogonal.
        let a = DenseMatrix::from_fn(5, 8, |i, j| {
            if j < 5 && i == j {
                1.0 + j as f64
            } else if j >= 5 && i == j - 5 {
                -0.1
            } else {
                0.0
            }
        })
        .unwrap();
        let x = DenseMatrix::embed_rows(8, &[1, 3], &DenseMatrix::from_rows(&[[2.0, -1.0], [0.5, 0.7]]).unwrap());
        let y = a.matmul(&x).unwrap();
        let r = somp_solve(&a, &y, 2, 0.0).unwrap();
        let mut s = r.support.clone();
        s.sort();
        assert_eq!(s, vec![1, 3]);
        assert!(r.solution.max_abs_diff(&x).unwrap() < 1e-14);
    }

    #[test]
    fn single_correlated_column_selected_first() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[[0.0], [3.0], [0.0]]).unwrap();
        let r = somp_solve(&a, &y, 1, 0.0);
        // Column 3 is zero.
        assert_eq!(r.unwrap_err(), Error::ZeroColumn { col: 3 });
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0, 0.5], [0.0, 1.0, 0.0, 0.5], [0.0, 0.0, 1.0, 0.5]]).unwrap();
        let r = somp_solve(&a, &y, 1, 0.0).unwrap();
        assert_eq!(r.support, vec![1]);
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[[1.0], [0.0]]).unwrap();
        let r = somp_solve(&a, &y, 1, 0.0).unwrap();
        assert_eq!(r.support, vec![0]);
    }

    #[test]
    fn degenerate_support_is_an_error() {
        // Duplicate columns plus a residual that keeps pointing at them.
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[[1.0], [0.0]]).unwrap();
        let r = somp_solve(&a, &y, 1, 0.0).unwrap();
        assert_eq!(r.support.len(), 1);
        // A residual orthogonal to every column scores all candidates zero,
        // so the tie-break picks the duplicate of the first selection.
        let a2 = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let y2 = DenseMatrix::from_rows(&[[0.0], [0.0], [1.0]]).unwrap();
        let err = somp_solve(&a2, &y2, 2, 0.0).unwrap_err();
        assert_eq!(err, Error::DegenerateSupport { support: vec![0, 1] });
    }

    #[test]
    fn residuals_decrease_and_support_bounded() {
        for seed in 0..10 {
            let p = generate(
                ProblemSize {
                    n: 60,
                    m: 20,
                    l: 3,
                    k: 5,
                },
                Some(20.0),
                seed,
            )
            .unwrap();
            let r = somp_solve(&p.a, &p.y, 7, DEFAULT_RESIDUAL_TOL).unwrap();
            assert!(r.support.len() <= 7);
            let mut sorted = r.support.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), r.support.len());
            assert!(r.residual_norms.windows(2).all(|w| w[1] < w[0]));
            assert!(r.residual_norms[0] < p.y.frobenius_norm());
        }
    }

    #[test]
    fn recovers_easy_noiseless_instance() {
        let p = generate(
            ProblemSize {
                n: 100,
                m: 40,
                l: 5,
                k: 5,
            },
            None,
            4,
        )
        .unwrap();
        let r = somp_solve(&p.a, &p.y, 5, DEFAULT_RESIDUAL_TOL).unwrap();
        let mut s = r.support.clone();
        s.sort();
        assert_eq!(s, p.support_true.iter().copied().collect::<Vec<_>>());
        assert!(r.solution.max_abs_diff(&p.x_true).unwrap() < 1e-10);
    }
}
