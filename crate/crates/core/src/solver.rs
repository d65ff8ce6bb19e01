//! Zero-point attracting projection for jointly sparse MMV recovery.
//!
//! Starting from the least squares solution `A†Y`, every iteration takes a
//! step of size `κ` against the gradient of the row-sparsity surrogate and
//! projects back onto `{X : A X = Y}`. Every `q` iterations the surrogate is
//! compared with its value `q` iterations earlier; if it has not decreased,
//! `κ` shrinks by `η`. The loop ends once `κ < κ_min` or after `t_max`
//! iterations.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Projector};
use crate::penalty::{approx_penalty, penalty_gradient, PenaltyParams};

/// Solver parameters. Defaults match the standard benchmark setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZapConfig {
    pub alpha: f64,
    pub kappa0: f64,
    pub eta: f64,
    pub q: usize,
    pub kappa_min: f64,
    pub t_max: usize,
}

impl Default for ZapConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            kappa0: 0.1,
            eta: 0.1,
            q: 11,
            kappa_min: 1e-6,
            t_max: 500,
        }
    }
}

impl ZapConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        PenaltyParams::new(self.alpha)?;
        if !(self.kappa0 > 0.0 && self.kappa0.is_finite()) {
            return bad(format!("kappa0 must be positive, got {}", self.kappa0));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.kappa_min > 0.0 && self.kappa_min < self.kappa0) {
            return bad(format!(
                "kappa_min must lie in (0, kappa0 = {}), got {}",
                self.kappa0, self.kappa_min
            ));
        }
        if self.q == 0 {
            return bad("q must be at least 1".into());
        }
        if self.t_max == 0 {
            return bad("t_max must be at least 1".into());
        }
        Ok(())
    }

    pub fn penalty(&self) -> PenaltyParams {
        PenaltyParams::new(self.alpha).expect("validated alpha")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `κ` fell below `κ_min`.
    StepSizeFloor,
    /// `t_max` iterations completed.
    IterationBudget,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::StepSizeFloor => "step_size_floor",
            StopReason::IterationBudget => "iteration_budget",
        }
    }
}

/// Final iterate plus per-iteration traces.
///
/// All traces have `iterations_run + 1` entries; entry `n` describes the state
/// after iteration `n`, entry 0 the least squares starting point. The `κ`
/// trace holds the step size in force *after* the step-control check of
/// iteration `n`, so `kappa_trace[n]` is the step used by iteration `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: DenseMatrix,
    pub iterations_run: usize,
    pub stop_reason: StopReason,
    pub penalty_trace: Vec<f64>,
    pub kappa_trace: Vec<f64>,
    pub feasibility_trace: Vec<f64>,
}

/// One attraction step followed by projection: `X̃ = X − κ∇J(X)`, then `X̃ + A†(Y − A X̃)`.
pub fn zap_step(
    x_prev: &DenseMatrix,
    projector: &Projector,
    y: &DenseMatrix,
    kappa: f64,
    p: PenaltyParams,
) -> Result<DenseMatrix> {
    let mut attracted = x_prev.clone();
    if kappa != 0.0 {
        attracted.axpy(-kappa, &penalty_gradient(x_prev, p))?;
    }
    projector.project(&attracted, y)
}

/// Runs the full iteration from `A†Y`.
pub fn zap_solve(a: &DenseMatrix, y: &DenseMatrix, cfg: &ZapConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let projector = Projector::new(a)?;
    zap_solve_with(&projector, y, cfg)
}

/// As [`zap_solve`] but reuses an existing projector.
pub fn zap_solve_with(projector: &Projector, y: &DenseMatrix, cfg: &ZapConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let p = cfg.penalty();
    let mut x = projector.least_squares(y)?;
    if !x.is_finite() {
        return Err(Error::NumericalDivergence { iteration: 0 });
    }

    let mut kappa = cfg.kappa0;
    let mut penalty_trace = vec![approx_penalty(&x, p)];
    let mut kappa_trace = vec![kappa];
    let mut feasibility_trace = vec![projector.relative_residual(&x, y)?];

    let mut n = 0;
    let stop_reason = loop {
        n += 1;
        x = zap_step(&x, projector, y, kappa, p)?;
        if !x.is_finite() {
            return Err(Error::NumericalDivergence { iteration: n });
        }
        let penalty = approx_penalty(&x, p);
        if n % cfg.q == 0 && penalty >= penalty_trace[n - cfg.q] {
            kappa *= cfg.eta;
        }
        penalty_trace.push(penalty);
        kappa_trace.push(kappa);
        feasibility_trace.push(projector.relative_residual(&x, y)?);

        if kappa < cfg.kappa_min {
            break StopReason::StepSizeFloor;
        }
        if n == cfg.t_max {
            break StopReason::IterationBudget;
        }
    };

    Ok(SolveResult {
        solution: x,
        iterations_run: n,
        stop_reason,
        penalty_trace,
        kappa_trace,
        feasibility_trace,
    })
}
