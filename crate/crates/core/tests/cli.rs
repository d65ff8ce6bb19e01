use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use zapmmv::linalg::io::load_matrix;
use zapmmv::metrics::relative_error;

fn zapmmv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zapmmv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Parses the single JSON error line and returns its kind.
fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("an error line");
    let v: serde_json::Value = serde_json::from_str(line).expect("machine-readable error");
    assert!(v["error"]["message"].is_string());
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn generate_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = zapmmv(&[
        "generate",
        "--n",
        "60",
        "--m",
        "20",
        "--l",
        "3",
        "--k",
        "3",
        "--seed",
        "11",
        "--out-dir",
        path(d),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = fs::read_to_string(d.join("meta.txt")).unwrap();
    assert!(meta.contains("snr=noiseless\nseed=11\n"));

    let x_true = load_matrix(d.join("x_true.txt")).unwrap();
    let xhat = d.join("xhat.txt");
    let trace = d.join("trace.csv");
    let out = zapmmv(&[
        "solve",
        "--a",
        path(&d.join("a.txt")),
        "--y",
        path(&d.join("y.txt")),
        "--out",
        path(&xhat),
        "--trace",
        path(&trace),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(relative_error(&x_true, &load_matrix(&xhat).unwrap()).unwrap() < 1e-3);
    let trace = fs::read_to_string(trace).unwrap();
    assert!(trace.starts_with("iteration,penalty,kappa,relative_residual\n0,"));

    let somp_out = d.join("somp.txt");
    let out = zapmmv(&[
        "solve",
        "--a",
        path(&d.join("a.txt")),
        "--y",
        path(&d.join("y.txt")),
        "--out",
        path(&somp_out),
        "--solver",
        "somp",
        "--k",
        "3",
    ]);
    assert!(out.status.success());
    assert!(relative_error(&x_true, &load_matrix(&somp_out).unwrap()).unwrap() < 1e-8);
}

#[test]
fn solve_errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = zapmmv(&[
        "solve",
        "--a",
        path(&d.join("nope.txt")),
        "--y",
        path(&d.join("nope.txt")),
        "--out",
        path(&d.join("x.txt")),
    ]);
    assert_eq!(error_kind(&missing), "io");

    fs::write(d.join("a.txt"), "2,3\n1,0,0\n0,1,0\n").unwrap();
    fs::write(d.join("y.txt"), "2,1\n1\n2\n").unwrap();
    let no_k = zapmmv(&[
        "solve",
        "--a",
        path(&d.join("a.txt")),
        "--y",
        path(&d.join("y.txt")),
        "--out",
        path(&d.join("x.txt")),
        "--solver",
        "somp",
    ]);
    assert_eq!(error_kind(&no_k), "invalid_parameter");

    fs::write(d.join("bad.txt"), "2,2\n1,x\n0,1\n").unwrap();
    let bad = zapmmv(&[
        "solve",
        "--a",
        path(&d.join("bad.txt")),
        "--y",
        path(&d.join("y.txt")),
        "--out",
        path(&d.join("x.txt")),
    ]);
    assert_eq!(error_kind(&bad), "parse");
}

#[test]
fn sweep_writes_csv_and_manifest_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs/k.csv");
    let args = [
        "sweep-k",
        "--n",
        "40",
        "--m",
        "15",
        "--l",
        "3",
        "--k-min",
        "2",
        "--k-max",
        "10",
        "--k-step",
        "4",
        "--trials",
        "4",
        "--seed",
        "3",
        "--out",
        path(&csv),
    ];
    let out = zapmmv(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read(&csv).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "k,solver,recovery_probability,mean_relative_error,mean_time_s,trials,errors"
    );
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1].starts_with("2,zap,"));

    let manifest = fs::read_to_string(dir.path().join("runs/k.csv.manifest")).unwrap();
    for needle in ["kind=sweep-k\n", "n=40\n", "seed=3\n", "trials=4\n", "rng=chacha8"] {
        assert!(manifest.contains(needle), "{needle} missing from {manifest}");
    }

    assert!(zapmmv(&args).status.success());
    assert_eq!(fs::read(&csv).unwrap(), first);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# oracle run\nn=10\nm=5\nk=1\ntrials=3\nsolvers=somp\n").unwrap();
    let out = zapmmv(&["oracle-check", "--config", path(&cfg), "--trials", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().collect();
    assert_eq!(rows.len(), 3);
    // zap was not selected, so it never matches.
    assert!(rows[1..].iter().all(|r| r.ends_with(",false,true")), "{stdout}");
}

#[test]
fn invalid_specs_fail_cleanly() {
    assert_eq!(
        error_kind(&zapmmv(&["sweep-snr", "--trials", "0"])),
        "invalid_parameter"
    );
    assert_eq!(
        error_kind(&zapmmv(&["sweep-k", "--solvers", "lasso"])),
        "invalid_parameter"
    );
    assert_eq!(
        error_kind(&zapmmv(&["oracle-check", "--n", "30", "--m", "10"])),
        "invalid_parameter"
    );
    // Argument errors come from the parser and also exit nonzero.
    assert!(!zapmmv(&["sweep-k", "--trials", "many"]).status.success());
}
