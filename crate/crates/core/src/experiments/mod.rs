//! Seeded Monte Carlo experiments: sparsity sweep, SNR sweep, timing ladder
//! and oracle cross-validation, each producing a fixed-schema CSV report.

mod report;
mod run;
mod spec;

pub use report::{BenchRow, CsvRow, ExperimentReport, OracleRow, SweepKRow, SweepSnrRow};
pub use run::{run, run_bench, run_oracle_check, run_sweep_k, run_sweep_snr, ORACLE_MATCH_TOL};
pub use spec::{ExperimentKind, ExperimentSpec, SolverKind, ORACLE_KAPPA_MIN, SIZE_LADDER};
