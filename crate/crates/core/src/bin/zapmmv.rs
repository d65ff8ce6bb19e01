use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zapmmv::experiments::{run, ExperimentKind, ExperimentSpec, SolverKind};
use zapmmv::linalg::io::{load_matrix, save_matrix};
use zapmmv::problem::{generate, ProblemSize};
use zapmmv::{somp_solve, zap_solve, Error, Result};

#[derive(Parser)]
#[command(
    name = "zapmmv",
    version,
    about = "Jointly sparse MMV recovery and its benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover X from matrix files A and Y.
    Solve(SolveArgs),
    /// Recovery probability against sparsity.
    SweepK(SweepArgs),
    /// Mean squared deviation against SNR.
    SweepSnr(SweepArgs),
    /// Solve time over the size ladder.
    Bench(SweepArgs),
    /// Compare both solvers with exhaustive search on small instances.
    OracleCheck(SweepArgs),
    /// Write one seeded instance (a.txt, y.txt, x_true.txt, meta.txt).
    Generate(GenerateArgs),
}

/// Overrides for the ZAP iteration.
#[derive(Args, Default)]
struct ZapArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial step size.
    #[arg(long)]
    kappa: Option<f64>,
    /// Step-size decay factor.
    #[arg(long)]
    eta: Option<f64>,
    /// Iterations between penalty checks.
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    kappa_min: Option<f64>,
    /// Iteration budget.
    #[arg(long)]
    t_max: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    k_step: Option<usize>,
    #[arg(long)]
    snr_min: Option<f64>,
    #[arg(long)]
    snr_max: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Append a noiseless point to the SNR sweep.
    #[arg(long)]
    noiseless_control: bool,
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of zap,somp.
    #[arg(long)]
    solvers: Option<String>,
    /// Residual tolerance for SOMP's early stop.
    #[arg(long)]
    somp_tol: Option<f64>,
    /// Record mean solve time in sweep CSVs (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
    /// Number of ladder rungs for bench (1..=5).
    #[arg(long)]
    max_rung: Option<usize>,
    /// Scale factor for n, m and k of each ladder rung.
    #[arg(long)]
    scale: Option<f64>,
    /// key=value settings applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when absent. A manifest is written to <out>.manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    zap: ZapArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// Destination of the recovered matrix.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "zap")]
    solver: SolverKind,
    /// Row sparsity, required by somp.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    somp_tol: Option<f64>,
    /// Write the per-iteration ZAP trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    zap: ZapArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    k: usize,
    /// Measurement SNR in dB; noiseless when absent.
    #[arg(long)]
    snr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn zap_settings(z: &ZapArgs) -> Vec<(&'static str, String)> {
    let mut kv = Vec::new();
    let mut push = |key, v: Option<String>| {
        if let Some(v) = v {
            kv.push((key, v));
        }
    };
    push("alpha", z.alpha.map(|v| v.to_string()));
    push("kappa", z.kappa.map(|v| v.to_string()));
    push("eta", z.eta.map(|v| v.to_string()));
    push("q", z.q.map(|v| v.to_string()));
    push("kappa-min", z.kappa_min.map(|v| v.to_string()));
    push("t-max", z.t_max.map(|v| v.to_string()));
    kv
}

fn sweep_settings(a: &SweepArgs) -> Vec<(&'static str, String)> {
    fn s<T: ToString>(v: Option<T>) -> Option<String> {
        v.map(|v| v.to_string())
    }
    let pairs = [
        ("n", s(a.n)),
        ("m", s(a.m)),
        ("l", s(a.l)),
        ("k", s(a.k)),
        ("k-min", s(a.k_min)),
        ("k-max", s(a.k_max)),
        ("k-step", s(a.k_step)),
        ("snr-min", s(a.snr_min)),
        ("snr-max", s(a.snr_max)),
        ("snr-step", s(a.snr_step)),
        ("noiseless-control", a.noiseless_control.then(|| "true".to_string())),
        ("trials", s(a.trials)),
        ("seed", s(a.seed)),
        ("solvers", a.solvers.clone()),
        ("somp-tol", s(a.somp_tol)),
        ("timing", a.timing.then(|| "true".to_string())),
        ("max-rung", s(a.max_rung)),
        ("scale", s(a.scale)),
    ];
    let mut kv: Vec<_> = pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    kv.extend(zap_settings(&a.zap));
    kv
}

/// Defaults, then the config file, then explicit flags.
fn resolve(kind: ExperimentKind, config: Option<&Path>, flags: &[(&str, String)]) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(kind);
    if let Some(path) = config {
        spec.apply_config_text(&fs::read_to_string(path)?)?;
    }
    for (key, value) in flags {
        spec.apply(key, value)?;
    }
    Ok(spec)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

fn run_sweep(kind: ExperimentKind, args: &SweepArgs) -> Result<()> {
    let spec = resolve(kind, args.config.as_deref(), &sweep_settings(args))?;
    spec.validate()?;
    let report = run(&spec)?;
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            report.write_csv(fs::File::create(path)?)?;
            fs::write(manifest_path(path), spec.manifest())?;
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<()> {
    let spec = resolve(ExperimentKind::Solve, args.config.as_deref(), &zap_settings(&args.zap))?;
    let a = load_matrix(&args.a)?;
    let y = load_matrix(&args.y)?;
    let solution = match args.solver {
        SolverKind::Zap => {
            let r = zap_solve(&a, &y, &spec.zap)?;
            if let Some(path) = &args.trace {
                let mut w = csv::Writer::from_path(path)?;
                w.write_record(["iteration", "penalty", "kappa", "relative_residual"])?;
                for i in 0..r.penalty_trace.len() {
                    w.write_record([
                        i.to_string(),
                        r.penalty_trace[i].to_string(),
                        r.kappa_trace[i].to_string(),
                        r.feasibility_trace[i].to_string(),
                    ])?;
                }
                w.flush()?;
            }
            eprintln!("iterations={} stop={}", r.iterations_run, r.stop_reason.as_str());
            r.solution
        }
        SolverKind::Somp => {
            let k = args.k.ok_or_else(|| Error::InvalidParameter("somp needs --k".into()))?;
            let tol = args.somp_tol.unwrap_or(spec.somp_residual_tol);
            somp_solve(&a, &y, k, tol)?.solution
        }
    };
    save_matrix(&solution, &args.out)
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let size = ProblemSize {
        n: args.n,
        m: args.m,
        l: args.l,
        k: args.k,
    };
    generate(size, args.snr, args.seed)?.export(&args.out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::SweepK(a) => run_sweep(ExperimentKind::SweepK, a),
        Command::SweepSnr(a) => run_sweep(ExperimentKind::SweepSnr, a),
        Command::Bench(a) => run_sweep(ExperimentKind::Bench, a),
        Command::OracleCheck(a) => run_sweep(ExperimentKind::OracleCheck, a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            let _ = writeln!(io::stderr(), "{line}");
            ExitCode::FAILURE
        }
    }
}
