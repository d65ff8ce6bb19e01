//! Small dense factorizations: Cholesky for SPD systems, Householder QR for
//! least squares, and one-sided Jacobi for singular values.

use super::matrix::DenseMatrix;

/// Lower-triangular Cholesky factor `L` with `G = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    /// Returns `None` when a pivot is not strictly positive.
    pub fn factor(g: &DenseMatrix) -> Option<Self> {
        let n = g.rows();
        debug_assert_eq!(n, g.cols());
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = g.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = g.get(i, j);
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                for (a, b) in ri.iter().zip(rj) {
                    s -= a * b;
                }
                l[i * n + j] = s / d;
            }
        }
        Some(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.lower[i * self.n + i])
    }

    /// Solves `G x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for (k, &bk) in b[..i].iter().enumerate() {
                s -= self.lower[i * n + k] * bk;
            }
            b[i] = s / self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for (k, &bk) in b.iter().enumerate().skip(i + 1) {
                s -= self.lower[k * n + i] * bk;
            }
            b[i] = s / self.lower[i * n + i];
        }
    }

    /// Solves `G X = B` for every column of `B` at once.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let w = b.cols();
        debug_assert_eq!(b.rows(), n);
        let mut x = b.clone();
        let data = x.as_mut_slice();
        // Forward: L Z = B, row by row so the inner loops run over contiguous rows.
        for i in 0..n {
            for k in 0..i {
                let l_ik = self.lower[i * n + k];
                if l_ik == 0.0 {
                    continue;
                }
                let (head, tail) = data.split_at_mut(i * w);
                for (t, s) in tail[..w].iter_mut().zip(&head[k * w..(k + 1) * w]) {
                    *t -= l_ik * s;
                }
            }
            let d = self.lower[i * n + i];
            data[i * w..(i + 1) * w].iter_mut().for_each(|v| *v /= d);
        }
        // Backward: Lᵀ X = Z.
        for i in (0..n).rev() {
            for k in i + 1..n {
                let l_ki = self.lower[k * n + i];
                if l_ki == 0.0 {
                    continue;
                }
                let (head, tail) = data.split_at_mut(k * w);
                for (t, s) in head[i * w..(i + 1) * w].iter_mut().zip(&tail[..w]) {
                    *t -= l_ki * s;
                }
            }
            let d = self.lower[i * n + i];
            data[i * w..(i + 1) * w].iter_mut().for_each(|v| *v /= d);
        }
        x
    }
}

/// Outcome of a QR least squares solve `min ‖A C − B‖_F`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: DenseMatrix,
    pub residual_norm: f64,
}

/// Relative pivot threshold below which QR declares a column dependent.
pub const QR_RANK_TOL: f64 = 1e-10;

/// Householder QR least squares for a tall (or square) `a`.
///
/// Returns `None` when `a` has more columns than rows or when a diagonal entry
/// of `R` falls below `QR_RANK_TOL` times the largest column norm.
pub fn least_squares(a: &DenseMatrix, b: &DenseMatrix) -> Option<LeastSquares> {
    let (m, n) = a.shape();
    let w = b.cols();
    if n > m || b.rows() != m {
        return None;
    }
    // Column-major working copy of A for cheap column access.
    let mut qr: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs: Vec<Vec<f64>> = (0..w).map(|j| b.column(j)).collect();
    let scale = qr
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = qr[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= QR_RANK_TOL * scale {
            return None;
        }
        let alpha = if qr[k][k] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place of column k below the diagonal.
        qr[k][k] -= alpha;
        let vnorm2: f64 = qr[k][k..].iter().map(|v| v * v).sum();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let (left, right) = qr.split_at_mut(k + 1);
        let v = &left[k][k..];
        for col in right.iter_mut().chain(rhs.iter_mut()) {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col[k..].iter_mut().zip(v) {
                *c -= f * vi;
            }
        }
    }
    // Back substitution on R (upper triangle: diag[k] and qr[j][k] for j > k).
    let mut coef = DenseMatrix::zeros(n, w);
    let mut residual2 = 0.0;
    for (c, col) in rhs.iter().enumerate() {
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = col[k];
            for j in k + 1..n {
                s -= qr[j][k] * x[j];
            }
            x[k] = s / diag[k];
        }
        for (k, v) in x.into_iter().enumerate() {
            coef.set(k, c, v);
        }
        residual2 += col[n..].iter().map(|v| v * v).sum::<f64>();
    }
    Some(LeastSquares {
        coefficients: coef,
        residual_norm: residual2.sqrt(),
    })
}

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    // Orthogonalize the columns of whichever orientation has fewer columns.
    let work = if a.cols() > a.rows() { a.transpose() } else { a.clone() };
    let n = work.cols();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v * v).sum();
                let beta: f64 = cols[q].iter().map(|v| v * v).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Count of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}
