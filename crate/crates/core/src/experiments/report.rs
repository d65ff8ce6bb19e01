use std::io::Write;

use super::spec::SolverKind;
use crate::error::Result;
use crate::problem::ProblemSize;

/// A row type with a fixed CSV schema.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepKRow {
    pub k: usize,
    pub solver: SolverKind,
    pub recovery_probability: Option<f64>,
    pub mean_relative_error: Option<f64>,
    /// Empty unless timing was requested.
    pub mean_time_s: Option<f64>,
    pub trials: usize,
    pub errors: usize,
}

impl CsvRow for SweepKRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "solver",
        "recovery_probability",
        "mean_relative_error",
        "mean_time_s",
        "trials",
        "errors",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.solver.to_string(),
            opt(self.recovery_probability),
            opt(self.mean_relative_error),
            opt(self.mean_time_s),
            self.trials.to_string(),
            self.errors.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSnrRow {
    /// `None` for the noiseless control point.
    pub snr_db: Option<f64>,
    pub solver: SolverKind,
    pub mean_msd_db: Option<f64>,
    pub mean_msd: Option<f64>,
    pub mean_relative_error: Option<f64>,
    pub trials: usize,
    pub errors: usize,
}

impl CsvRow for SweepSnrRow {
    const HEADER: &'static [&'static str] = &[
        "snr_db",
        "solver",
        "mean_msd_db",
        "mean_msd",
        "mean_relative_error",
        "trials",
        "errors",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.snr_db.map_or_else(|| "noiseless".to_string(), |v| v.to_string()),
            self.solver.to_string(),
            opt(self.mean_msd_db),
            opt(self.mean_msd),
            opt(self.mean_relative_error),
            self.trials.to_string(),
            self.errors.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: ProblemSize,
    pub solver: SolverKind,
    pub mean_time_s: Option<f64>,
    pub trials: usize,
    pub errors: usize,
}

impl CsvRow for BenchRow {
    const HEADER: &'static [&'static str] = &["n", "m", "k", "l", "solver", "mean_time_s", "trials", "errors"];

    fn record(&self) -> Vec<String> {
        vec![
            self.size.n.to_string(),
            self.size.m.to_string(),
            self.size.k.to_string(),
            self.size.l.to_string(),
            self.solver.to_string(),
            opt(self.mean_time_s),
            self.trials.to_string(),
            self.errors.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub trial: usize,
    pub k: usize,
    pub unique_bound_ok: bool,
    pub zap_matches_oracle: bool,
    pub somp_matches_oracle: bool,
}

impl CsvRow for OracleRow {
    const HEADER: &'static [&'static str] = &[
        "trial",
        "k",
        "unique_bound_ok",
        "zap_matches_oracle",
        "somp_matches_oracle",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.k.to_string(),
            self.unique_bound_ok.to_string(),
            self.zap_matches_oracle.to_string(),
            self.somp_matches_oracle.to_string(),
        ]
    }
}

/// Header plus rendered records, ready to write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentReport {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl ExperimentReport {
    pub fn from_rows<R: CsvRow>(rows: &[R]) -> Self {
        Self {
            header: R::HEADER.iter().map(|s| s.to_string()).collect(),
            records: rows.iter().map(CsvRow::record).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.records {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}
