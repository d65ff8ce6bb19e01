use super::decomp::Cholesky;
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Gram matrices with a condition estimate above this are rejected.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// Affine projector onto `{X : A X = Y}` for a fat, full-row-rank `A`.
///
/// Holds `A` and `A† = Aᵀ (A Aᵀ)⁻¹`, computed once from a Cholesky
/// factorization of the Gram matrix.
#[derive(Debug, Clone)]
pub struct Projector {
    sensing: DenseMatrix,
    pseudoinverse: DenseMatrix,
    gram_condition: f64,
}

impl Projector {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        if m >= n {
            return Err(Error::NotUnderdetermined { rows: m, cols: n });
        }
        let gram = a.matmul(&a.transpose())?;
        let chol = Cholesky::factor(&gram).ok_or(Error::SingularGram {
            condition: f64::INFINITY,
        })?;
        let condition = condition_estimate(&gram, &chol);
        if !(condition <= MAX_GRAM_CONDITION) {
            return Err(Error::SingularGram { condition });
        }
        // (A Aᵀ)⁻¹ A is M x N; its transpose is A†.
        let pseudoinverse = chol.solve_matrix(a).transpose();
        let p = Self {
            sensing: a.clone(),
            pseudoinverse,
            gram_condition: condition,
        };
        #[cfg(debug_assertions)]
        {
            let err = p.penrose_residual();
            debug_assert!(
                err <= 1e-10 * condition.sqrt().max(1.0),
                "A A† A deviates from A by {err:e}"
            );
        }
        Ok(p)
    }

    pub fn sensing(&self) -> &DenseMatrix {
        &self.sensing
    }

    pub fn pseudoinverse(&self) -> &DenseMatrix {
        &self.pseudoinverse
    }

    /// Estimated 2-norm condition number of `A Aᵀ`.
    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// `‖A A† A − A‖_F / ‖A‖_F`.
    pub fn penrose_residual(&self) -> f64 {
        let a = &self.sensing;
        let aa = a.matmul(&self.pseudoinverse).and_then(|p| p.matmul(a));
        match aa.and_then(|x| x.sub(a)) {
            Ok(d) => d.frobenius_norm() / a.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `X + A†(Y − A X)`.
    pub fn project(&self, x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = x.clone();
        let residual = self.residual(x, y)?;
        out.axpy(1.0, &self.pseudoinverse.matmul(&residual)?)?;
        Ok(out)
    }

    /// The least squares (minimum-norm) solution `A† Y`.
    pub fn least_squares(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        if y.rows() != self.sensing.rows() {
            return Err(self.sensing.mismatch("least_squares", y));
        }
        self.pseudoinverse.matmul(y)
    }

    /// `Y − A X`.
    pub fn residual(&self, x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != y.cols() || y.rows() != self.sensing.rows() {
            return Err(x.mismatch("project", y));
        }
        y.sub(&self.sensing.matmul(x)?)
    }

    /// `‖A X − Y‖_F / ‖Y‖_F`, or the absolute residual when `Y = 0`.
    pub fn relative_residual(&self, x: &DenseMatrix, y: &DenseMatrix) -> Result<f64> {
        let r = self.residual(x, y)?.frobenius_norm();
        let scale = y.frobenius_norm();
        Ok(if scale > 0.0 { r / scale } else { r })
    }
}

/// Free-function form of [`Projector::new`].
pub fn build_projector(a: &DenseMatrix) -> Result<Projector> {
    Projector::new(a)
}

/// Free-function form of [`Projector::project`].
pub fn project(p: &Projector, x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    p.project(x, y)
}

/// Extreme eigenvalues by power and inverse-power iteration, floored by the
/// Cholesky pivot ratio (which is always a lower bound on the condition number).
fn condition_estimate(gram: &DenseMatrix, chol: &Cholesky) -> f64 {
    const MAX_ITERS: usize = 100;
    const TOL: f64 = 1e-8;
    let m = chol.dim();
    let start: Vec<f64> = (0..m).map(|i| 1.0 + (i as f64 + 1.0) / (m as f64 + 1.0)).collect();

    let normalize = |v: &mut [f64]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
    };

    let mut v = start.clone();
    normalize(&mut v);
    let mut lambda_max = 0.0;
    for _ in 0..MAX_ITERS {
        let mut w: Vec<f64> = (0..m)
            .map(|i| gram.row(i).iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let est: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        normalize(&mut w);
        v = w;
        let done = (est - lambda_max).abs() <= TOL * est.abs();
        lambda_max = est;
        if done {
            break;
        }
    }

    let mut v = start;
    normalize(&mut v);
    let mut inv_max = 0.0;
    for _ in 0..MAX_ITERS {
        let mut w = v.clone();
        chol.solve_in_place(&mut w);
        let est: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        if !est.is_finite() {
            return f64::INFINITY;
        }
        normalize(&mut w);
        v = w;
        let done = (est - inv_max).abs() <= TOL * est.abs();
        inv_max = est;
        if done {
            break;
        }
    }

    let (lo, hi) = chol
        .diagonal()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let pivot_bound = (hi / lo).powi(2);
    (lambda_max * inv_max).max(pivot_bound)
}
