use std::time::Instant;

use rayon::prelude::*;

use super::report::{BenchRow, ExperimentReport, OracleRow, SweepKRow, SweepSnrRow};
use super::spec::{ExperimentKind, ExperimentSpec, SolverKind};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::metrics::{aggregate, relative_error, to_db, TrialOutcome, DETECTION_ZERO_TOL};
use crate::oracle::{binomial, exhaustive_solve, uniqueness_check, MAX_SUPPORTS};
use crate::problem::{generate, MmvProblem, ProblemSize};
use crate::solver::zap_solve;
use crate::somp::somp_solve;

/// Agreement tolerance between a solver and the exhaustive oracle.
pub const ORACLE_MATCH_TOL: f64 = 1e-6;

/// Recovered matrix and, for greedy solvers, the explicit support.
struct Estimate {
    solution: DenseMatrix,
    support: Option<Vec<usize>>,
    elapsed_seconds: f64,
}

fn solve_with(spec: &ExperimentSpec, solver: SolverKind, problem: &MmvProblem) -> Result<Estimate> {
    let start = Instant::now();
    let (solution, support) = match solver {
        SolverKind::Zap => (zap_solve(&problem.a, &problem.y, &spec.zap)?.solution, None),
        SolverKind::Somp => {
            let r = somp_solve(
                &problem.a,
                &problem.y,
                problem.support_true.len(),
                spec.somp_residual_tol,
            )?;
            (r.solution, Some(r.support))
        }
    };
    Ok(Estimate {
        solution,
        support,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_trial(
    spec: &ExperimentSpec,
    solver: SolverKind,
    size: ProblemSize,
    snr: Option<f64>,
    trial: usize,
) -> Result<TrialOutcome> {
    let problem = generate(size, snr, spec.seed_for(trial))?;
    let est = solve_with(spec, solver, &problem)?;
    let mut outcome = TrialOutcome::evaluate(&problem.x_true, &est.solution, DETECTION_ZERO_TOL, est.elapsed_seconds)?;
    if let Some(support) = est.support {
        outcome.detected_rows = support.iter().filter(|i| problem.support_true.contains(i)).count();
    }
    Ok(outcome)
}

/// Successful outcomes in trial order, plus the number of failed trials.
struct Point {
    outcomes: Vec<TrialOutcome>,
    errors: usize,
}

fn run_point(spec: &ExperimentSpec, solver: SolverKind, size: ProblemSize, snr: Option<f64>) -> Point {
    let results: Vec<Result<TrialOutcome>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, solver, size, snr, t))
        .collect();
    let errors = results.iter().filter(|r| r.is_err()).count();
    Point {
        outcomes: results.into_iter().filter_map(Result::ok).collect(),
        errors,
    }
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {} spec, got {}",
            kind.as_str(),
            spec.kind.as_str()
        )));
    }
    spec.validate()
}

/// Recovery probability against sparsity.
pub fn run_sweep_k(spec: &ExperimentSpec) -> Result<Vec<SweepKRow>> {
    expect_kind(spec, ExperimentKind::SweepK)?;
    let mut rows = Vec::new();
    for k in spec.k_values() {
        let size = ProblemSize {
            n: spec.n,
            m: spec.m,
            l: spec.l,
            k,
        };
        for &solver in &spec.solvers {
            let point = run_point(spec, solver, size, None);
            let summary = aggregate(&point.outcomes).ok();
            rows.push(SweepKRow {
                k,
                solver,
                recovery_probability: summary.map(|s| s.recovery_probability),
                mean_relative_error: summary.map(|s| s.mean_relative_error),
                mean_time_s: summary.filter(|_| spec.record_timing).map(|s| s.mean_time),
                trials: point.outcomes.len(),
                errors: point.errors,
            });
        }
    }
    Ok(rows)
}

/// Mean squared deviation against measurement SNR.
pub fn run_sweep_snr(spec: &ExperimentSpec) -> Result<Vec<SweepSnrRow>> {
    expect_kind(spec, ExperimentKind::SweepSnr)?;
    let size = ProblemSize {
        n: spec.n,
        m: spec.m,
        l: spec.l,
        k: spec.k,
    };
    let mut rows = Vec::new();
    for snr in spec.snr_values() {
        for &solver in &spec.solvers {
            let point = run_point(spec, solver, size, snr);
            let summary = aggregate(&point.outcomes).ok();
            rows.push(SweepSnrRow {
                snr_db: snr,
                solver,
                mean_msd_db: summary.map(|s| to_db(s.mean_msd)),
                mean_msd: summary.map(|s| s.mean_msd),
                mean_relative_error: summary.map(|s| s.mean_relative_error),
                trials: point.outcomes.len(),
                errors: point.errors,
            });
        }
    }
    Ok(rows)
}

/// Wall-clock solve time over the size ladder. Each (rung, solver) pair
/// starts with one untimed warm-up solve of trial 0's instance.
pub fn run_bench(spec: &ExperimentSpec) -> Result<Vec<BenchRow>> {
    expect_kind(spec, ExperimentKind::Bench)?;
    let mut rows = Vec::new();
    for size in spec.ladder() {
        for &solver in &spec.solvers {
            if let Ok(problem) = generate(size, None, spec.seed_for(0)) {
                let _ = solve_with(spec, solver, &problem);
            }
            // Sequential so trials do not compete for cores.
            let mut times = Vec::with_capacity(spec.trials);
            let mut errors = 0;
            for t in 0..spec.trials {
                match generate(size, None, spec.seed_for(t)).and_then(|p| solve_with(spec, solver, &p)) {
                    Ok(est) => times.push(est.elapsed_seconds),
                    Err(_) => errors += 1,
                }
            }
            let mean_time_s = if times.is_empty() {
                None
            } else {
                times.sort_by(f64::total_cmp);
                Some(times.iter().sum::<f64>() / times.len() as f64)
            };
            rows.push(BenchRow {
                size,
                solver,
                mean_time_s,
                trials: times.len(),
                errors,
            });
        }
    }
    Ok(rows)
}

/// Compares both solvers with the exhaustive-search oracle on small instances.
pub fn run_oracle_check(spec: &ExperimentSpec) -> Result<Vec<OracleRow>> {
    expect_kind(spec, ExperimentKind::OracleCheck)?;
    let supports = binomial(spec.n, spec.k);
    if supports > MAX_SUPPORTS {
        return Err(Error::OracleTooLarge {
            detail: format!(
                "C({}, {}) = {supports} supports exceeds {MAX_SUPPORTS}; use n <= 20 and a small k",
                spec.n, spec.k
            ),
        });
    }
    let size = ProblemSize {
        n: spec.n,
        m: spec.m,
        l: spec.l,
        k: spec.k,
    };
    (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let problem = generate(size, None, spec.seed_for(trial))?;
            let bound = uniqueness_check(&problem.a, &problem.y, spec.k)?;
            let oracle = exhaustive_solve(&problem.a, &problem.y, spec.k)?;
            let matches = |solver: SolverKind| {
                spec.solvers.contains(&solver)
                    && solve_with(spec, solver, &problem)
                        .and_then(|est| relative_error(&oracle.solution, &est.solution))
                        .is_ok_and(|e| e < ORACLE_MATCH_TOL)
            };
            Ok(OracleRow {
                trial,
                k: spec.k,
                unique_bound_ok: bound.unique,
                zap_matches_oracle: matches(SolverKind::Zap),
                somp_matches_oracle: matches(SolverKind::Somp),
            })
        })
        .collect()
}

/// Dispatches on `spec.kind`.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    match spec.kind {
        ExperimentKind::SweepK => Ok(ExperimentReport::from_rows(&run_sweep_k(spec)?)),
        ExperimentKind::SweepSnr => Ok(ExperimentReport::from_rows(&run_sweep_snr(spec)?)),
        ExperimentKind::Bench => Ok(ExperimentReport::from_rows(&run_bench(spec)?)),
        ExperimentKind::OracleCheck => Ok(ExperimentReport::from_rows(&run_oracle_check(spec)?)),
        ExperimentKind::Solve => Err(Error::InvalidParameter(
            "solve reads its instance from files; it has no sweep report".into(),
        )),
    }
}
