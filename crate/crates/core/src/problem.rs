//! Seeded generation of jointly row-sparse MMV instances.
//!
//! Random stream: ChaCha8 (`rand_chacha` 0.3, seeded through
//! `SeedableRng::seed_from_u64`). Uniform doubles take the top 53 bits of
//! `next_u64`. Standard normals use the Box–Muller transform with `libm`
//! transcendental functions so the bits do not depend on the platform's libm.
//! This is stream version 1; any change to the draw order below bumps it.
//!
//! Draw order for one instance: `A` row-major, the support (partial
//! Fisher–Yates over `0..n`), the nonzero rows of `X` in ascending row order,
//! then the noise matrix row-major when an SNR is requested.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::io::save_matrix;
use crate::linalg::DenseMatrix;

/// Identifies the generator algorithm in run manifests.
pub const RNG_STREAM_VERSION: &str = "chacha8-rand_chacha-0.3/box-muller-libm/v1";

/// Deterministic stream of uniform and standard normal variates.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer on `0..bound` by rejection (no modulo bias).
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let bound = bound as u64;
        let zone = (u64::MAX / bound) * bound;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Standard normal variate.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * libm::sin(theta));
        radius * libm::cos(theta)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| self.next()).collect();
        DenseMatrix::from_raw(rows, cols, data)
    }

    /// Uniformly random `k`-subset of `0..n`, sorted ascending.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }
}

/// Problem dimensions and noise level; together with the seed these fix every entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSize {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmvProblem {
    pub a: DenseMatrix,
    pub y: DenseMatrix,
    pub x_true: DenseMatrix,
    pub support_true: BTreeSet<usize>,
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl MmvProblem {
    pub fn size(&self) -> ProblemSize {
        ProblemSize {
            n: self.a.cols(),
            m: self.a.rows(),
            l: self.y.cols(),
            k: self.support_true.len(),
        }
    }

    /// `10 log10(‖A X‖² / ‖Y − A X‖²)`; infinite for noiseless instances.
    pub fn realized_snr_db(&self) -> f64 {
        let clean = self.a.matmul(&self.x_true).expect("consistent shapes");
        let noise = self.y.sub(&clean).expect("consistent shapes").frobenius_norm();
        10.0 * (clean.frobenius_norm().powi(2) / noise.powi(2)).log10()
    }

    /// Writes `a.txt`, `y.txt`, `x_true.txt` and `meta.txt` into `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        save_matrix(&self.a, dir.join("a.txt"))?;
        save_matrix(&self.y, dir.join("y.txt"))?;
        save_matrix(&self.x_true, dir.join("x_true.txt"))?;
        let s = self.size();
        let snr = self.snr_db.map_or_else(|| "noiseless".to_string(), |v| v.to_string());
        let support: Vec<String> = self.support_true.iter().map(|i| i.to_string()).collect();
        let meta = format!(
            "n={}\nm={}\nl={}\nk={}\nsnr={}\nseed={}\nsupport={}\nrng={}\n",
            s.n,
            s.m,
            s.l,
            s.k,
            snr,
            self.seed,
            support.join(";"),
            RNG_STREAM_VERSION
        );
        fs::write(dir.join("meta.txt"), meta)?;
        Ok(())
    }
}

/// Draws one instance: Gaussian `A`, uniform random support of size `k`,
/// standard normal nonzero rows, and optional white Gaussian noise scaled so
/// the realized SNR equals `snr_db` exactly.
///
/// `k` may exceed `m` (such instances are not recoverable, but sweeps over
/// sparsity need them); it may not exceed `n`.
pub fn generate(size: ProblemSize, snr_db: Option<f64>, seed: u64) -> Result<MmvProblem> {
    let ProblemSize { n, m, l, k } = size;
    if n == 0 || m == 0 || l == 0 {
        return Err(Error::InvalidParameter(format!(
            "dimensions must be positive, got n={n} m={m} l={l}"
        )));
    }
    if m >= n {
        return Err(Error::InvalidParameter(format!("need m < n, got m={m} n={n}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("need k <= n, got k={k} n={n}")));
    }
    if let Some(snr) = snr_db {
        if !snr.is_finite() {
            return Err(Error::InvalidParameter(format!("snr must be finite, got {snr}")));
        }
        if k == 0 {
            return Err(Error::InvalidParameter(
                "SNR undefined for a zero signal (k = 0)".into(),
            ));
        }
    }

    let mut rng = GaussianStream::new(seed);
    let a = rng.matrix(m, n);
    let support = rng.subset(n, k);
    let block = rng.matrix(k, l);
    let x_true = DenseMatrix::embed_rows(n, &support, &block);
    let clean = a.matmul(&x_true)?;

    let y = match snr_db {
        None => clean,
        Some(snr) => {
            let noise = rng.matrix(m, l);
            let signal_power = clean.frobenius_norm().powi(2);
            let noise_power = noise.frobenius_norm().powi(2);
            let target = signal_power / 10f64.powf(snr / 10.0);
            let mut y = clean;
            y.axpy((target / noise_power).sqrt(), &noise)?;
            y
        }
    };

    if !y.is_finite() {
        return Err(Error::NumericalDivergence { iteration: 0 });
    }
    Ok(MmvProblem {
        a,
        y,
        x_true,
        support_true: support.into_iter().collect(),
        snr_db,
        seed,
    })
}
