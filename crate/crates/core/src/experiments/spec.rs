use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::{ProblemSize, RNG_STREAM_VERSION};
use crate::solver::ZapConfig;
use crate::somp::DEFAULT_RESIDUAL_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Solve,
    SweepK,
    SweepSnr,
    Bench,
    OracleCheck,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::SweepK => "sweep-k",
            ExperimentKind::SweepSnr => "sweep-snr",
            ExperimentKind::Bench => "bench",
            ExperimentKind::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverKind {
    Zap,
    Somp,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Zap => "zap",
            SolverKind::Somp => "somp",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zap" => Ok(SolverKind::Zap),
            "somp" => Ok(SolverKind::Somp),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver {other:?} (expected zap or somp)"
            ))),
        }
    }
}

/// Problem sizes `(N, M, K, L)` timed by `bench`, smallest first.
pub const SIZE_LADDER: [ProblemSize; 5] = [
    ProblemSize {
        n: 1000,
        m: 250,
        k: 50,
        l: 10,
    },
    ProblemSize {
        n: 2000,
        m: 500,
        k: 100,
        l: 10,
    },
    ProblemSize {
        n: 3000,
        m: 750,
        k: 150,
        l: 10,
    },
    ProblemSize {
        n: 4000,
        m: 1000,
        k: 200,
        l: 10,
    },
    ProblemSize {
        n: 5000,
        m: 1250,
        k: 250,
        l: 10,
    },
];

/// Step-size floor used by `oracle-check` unless overridden.
pub const ORACLE_KAPPA_MIN: f64 = 1e-9;

/// Everything needed to reproduce one experiment run.
///
/// Trial `t` of any sweep point uses seed `base_seed + t`, so a single CSV
/// cell can be recomputed from the spec alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub k: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub k_step: usize,
    pub snr_min: f64,
    pub snr_max: f64,
    pub snr_step: f64,
    /// Adds a noiseless point to the SNR sweep.
    pub noiseless_control: bool,
    pub trials: usize,
    pub base_seed: u64,
    pub solvers: Vec<SolverKind>,
    pub zap: ZapConfig,
    pub somp_residual_tol: f64,
    /// Fill the `mean_time_s` column of sweeps. Off by default so reruns are byte-identical.
    pub record_timing: bool,
    /// Number of ladder rungs timed by `bench` (1..=5).
    pub max_rung: usize,
    /// Multiplier applied to `n`, `m` and `k` of every ladder rung.
    pub ladder_scale: f64,
}

impl ExperimentSpec {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            kind,
            n: 200,
            m: 50,
            l: 10,
            k: 10,
            k_min: 2,
            k_max: 50,
            k_step: 2,
            snr_min: 10.0,
            snr_max: 50.0,
            snr_step: 10.0,
            noiseless_control: false,
            trials: 200,
            base_seed: 0,
            solvers: vec![SolverKind::Zap, SolverKind::Somp],
            zap: ZapConfig::default(),
            somp_residual_tol: DEFAULT_RESIDUAL_TOL,
            record_timing: false,
            max_rung: 1,
            ladder_scale: 1.0,
        };
        match kind {
            ExperimentKind::Bench => Self {
                trials: 10,
                record_timing: true,
                ..base
            },
            ExperimentKind::OracleCheck => Self {
                n: 8,
                m: 4,
                l: 2,
                k: 1,
                trials: 100,
                // At the default floor the final iterate sits about 1e-6 off
                // the fixed point, the same size as the oracle match tolerance.
                zap: ZapConfig {
                    kappa_min: ORACLE_KAPPA_MIN,
                    ..base.zap
                },
                ..base
            },
            ExperimentKind::Solve => Self {
                solvers: vec![SolverKind::Zap],
                ..base
            },
            _ => base,
        }
    }

    /// Applies one `key=value` setting; keys match the CLI flag names.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            v.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("{key}: cannot parse {v:?}: {e}")))
        }
        fn flag(key: &str, v: &str) -> Result<bool> {
            match v.trim() {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(Error::Parse(format!("{key}: expected a boolean, got {v:?}"))),
            }
        }
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "n" => self.n = num(&key, value)?,
            "m" => self.m = num(&key, value)?,
            "l" => self.l = num(&key, value)?,
            "k" => self.k = num(&key, value)?,
            "k-min" => self.k_min = num(&key, value)?,
            "k-max" => self.k_max = num(&key, value)?,
            "k-step" => self.k_step = num(&key, value)?,
            "snr-min" => self.snr_min = num(&key, value)?,
            "snr-max" => self.snr_max = num(&key, value)?,
            "snr-step" => self.snr_step = num(&key, value)?,
            "noiseless-control" => self.noiseless_control = flag(&key, value)?,
            "trials" => self.trials = num(&key, value)?,
            "seed" => self.base_seed = num(&key, value)?,
            "solvers" => {
                self.solvers = value
                    .split([',', ';'])
                    .filter(|s| !s.trim().is_empty())
                    .map(SolverKind::from_str)
                    .collect::<Result<_>>()?
            }
            "alpha" => self.zap.alpha = num(&key, value)?,
            "kappa" => self.zap.kappa0 = num(&key, value)?,
            "eta" => self.zap.eta = num(&key, value)?,
            "q" => self.zap.q = num(&key, value)?,
            "kappa-min" => self.zap.kappa_min = num(&key, value)?,
            "t-max" => self.zap.t_max = num(&key, value)?,
            "somp-tol" => self.somp_residual_tol = num(&key, value)?,
            "timing" => self.record_timing = flag(&key, value)?,
            "max-rung" => self.max_rung = num(&key, value)?,
            "scale" => self.ladder_scale = num(&key, value)?,
            other => return Err(Error::Parse(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Reads a flat `key=value` file; blank lines and `#` comments are ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", lineno + 1)))?;
            self.apply(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        self.zap.validate()?;
        if !(self.somp_residual_tol >= 0.0) {
            return bad(format!("somp-tol must be nonnegative, got {}", self.somp_residual_tol));
        }
        let dims = |n: usize, m: usize, l: usize| {
            if n == 0 || m == 0 || l == 0 || m >= n {
                Err(Error::InvalidParameter(format!(
                    "need 0 < m < n and l > 0, got n={n} m={m} l={l}"
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::SweepK => {
                dims(self.n, self.m, self.l)?;
                if self.k_step == 0 || self.k_min > self.k_max || self.k_max > self.n {
                    return bad(format!(
                        "k range {}..={} step {} is empty or exceeds n={}",
                        self.k_min, self.k_max, self.k_step, self.n
                    ));
                }
            }
            ExperimentKind::SweepSnr => {
                dims(self.n, self.m, self.l)?;
                if self.k == 0 || self.k > self.n {
                    return bad(format!("need 1 <= k <= n, got k={}", self.k));
                }
                if !(self.snr_step > 0.0) || !(self.snr_min <= self.snr_max) || !self.snr_max.is_finite() {
                    return bad(format!(
                        "snr range {}..={} step {} is empty",
                        self.snr_min, self.snr_max, self.snr_step
                    ));
                }
            }
            ExperimentKind::Bench => {
                if !(1..=SIZE_LADDER.len()).contains(&self.max_rung) {
                    return bad(format!("max-rung must lie in 1..=5, got {}", self.max_rung));
                }
                if !(self.ladder_scale > 0.0 && self.ladder_scale <= 1.0) {
                    return bad(format!("scale must lie in (0, 1], got {}", self.ladder_scale));
                }
                for s in self.ladder() {
                    dims(s.n, s.m, s.l)?;
                }
            }
            ExperimentKind::OracleCheck => {
                dims(self.n, self.m, self.l)?;
                if self.k == 0 || self.k > self.m {
                    return bad(format!("oracle-check needs 1 <= k <= m, got k={} m={}", self.k, self.m));
                }
                if self.n > crate::oracle::MAX_SPARK_COLUMNS {
                    return bad(format!(
                        "oracle-check needs n <= {} for the spark computation, got n={}",
                        crate::oracle::MAX_SPARK_COLUMNS,
                        self.n
                    ));
                }
            }
            ExperimentKind::Solve => {}
        }
        Ok(())
    }

    pub fn k_values(&self) -> Vec<usize> {
        (self.k_min..=self.k_max).step_by(self.k_step.max(1)).collect()
    }

    /// SNR grid in dB; `None` marks the noiseless control point, emitted last.
    pub fn snr_values(&self) -> Vec<Option<f64>> {
        let mut out = Vec::new();
        let mut i = 0u32;
        loop {
            let v = self.snr_min + f64::from(i) * self.snr_step;
            if v > self.snr_max + 1e-9 * self.snr_step {
                break;
            }
            out.push(Some(v));
            i += 1;
        }
        if self.noiseless_control {
            out.push(None);
        }
        out
    }

    pub fn ladder(&self) -> Vec<ProblemSize> {
        let scale = |v: usize| ((v as f64 * self.ladder_scale).round() as usize).max(1);
        SIZE_LADDER[..self.max_rung.min(SIZE_LADDER.len())]
            .iter()
            .map(|s| ProblemSize {
                n: scale(s.n),
                m: scale(s.m),
                k: scale(s.k),
                l: s.l,
            })
            .collect()
    }

    pub fn seed_for(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    /// Resolved settings as `key=value` lines, plus tool and generator versions.
    pub fn manifest(&self) -> String {
        let solvers: Vec<&str> = self.solvers.iter().map(|s| s.as_str()).collect();
        let lines = [
            ("kind", self.kind.as_str().to_string()),
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("l", self.l.to_string()),
            ("k", self.k.to_string()),
            ("k-min", self.k_min.to_string()),
            ("k-max", self.k_max.to_string()),
            ("k-step", self.k_step.to_string()),
            ("snr-min", self.snr_min.to_string()),
            ("snr-max", self.snr_max.to_string()),
            ("snr-step", self.snr_step.to_string()),
            ("noiseless-control", self.noiseless_control.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.base_seed.to_string()),
            ("solvers", solvers.join(",")),
            ("alpha", self.zap.alpha.to_string()),
            ("kappa", self.zap.kappa0.to_string()),
            ("eta", self.zap.eta.to_string()),
            ("q", self.zap.q.to_string()),
            ("kappa-min", self.zap.kappa_min.to_string()),
            ("t-max", self.zap.t_max.to_string()),
            ("somp-tol", self.somp_residual_tol.to_string()),
            ("timing", self.record_timing.to_string()),
            ("max-rung", self.max_rung.to_string()),
            ("scale", self.ladder_scale.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("rng", RNG_STREAM_VERSION.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
