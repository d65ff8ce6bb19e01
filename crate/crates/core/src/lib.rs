//! Jointly sparse recovery for multiple-measurement-vector problems
//! `Y = A X` by zero-point attracting projection (ZAP), with a simultaneous
//! OMP baseline, brute-force oracles for small instances, and a seeded
//! benchmark harness.
//!
//! ```
//! use zapmmv::problem::{generate, ProblemSize};
//! use zapmmv::solver::{zap_solve, ZapConfig};
//!
//! let p = generate(ProblemSize { n: 60, m: 20, l: 4, k: 3 }, None, 7).unwrap();
//! let r = zap_solve(&p.a, &p.y, &ZapConfig::default()).unwrap();
//! let err = zapmmv::metrics::relative_error(&p.x_true, &r.solution).unwrap();
//! assert!(err < 1e-3);
//! ```

// Negated float comparisons are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod penalty;
pub mod problem;
pub mod solver;
pub mod somp;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Projector};
pub use problem::{generate, MmvProblem, ProblemSize};
pub use solver::{zap_solve, zap_step, SolveResult, StopReason, ZapConfig};
pub use somp::{somp_solve, SompResult};
