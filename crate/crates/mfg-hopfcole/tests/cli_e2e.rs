//! End-to-end runs of the `mfg` binary: exit codes, file formats, the
//! committed regression fixture, and byte-level determinism.

use mfg_hopfcole::io::{read_csv, write_csv, Summary};
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mfg")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mfg-e2e-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("spawn mfg");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, name: &str, coupling: &str, n: usize) -> PathBuf {
    let path = dir.join(name);
    let text = format!(
        r#"[domain]
kind = "interval"
a = 0.0
b = 1.0

[hamiltonian]
nu = 1.0
r = 2.0
h0 = 1.0

[coupling]
{coupling}

[solver]
n = {n}
"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_zero_coupling_reports_zero_lambda_and_flat_transform() {
    let dir = scratch("zero");
    let cfg = write_config(&dir, "zero.toml", "kind = \"zero\"", 65);
    let out = dir.join("out");
    let (code, _, _) = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--which",
        "coupled",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let summary = Summary::read(&out.join("coupled.summary.txt")).unwrap();
    assert!(summary.get_f64("lambda").unwrap().abs() <= 1e-10);

    // The forward transform of the flat solution is the flat phi.
    let (code, _, _) = run(&[
        "transform",
        "--config",
        cfg.to_str().unwrap(),
        "--direction",
        "forward",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (_, cols) = read_csv(&out.join("forward.csv")).unwrap();
    let phi = &cols[1];
    for v in phi {
        assert!((v - phi[0]).abs() <= 1e-10, "phi not constant");
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn solve_linear_coupling_reports_unit_lambda() {
    let dir = scratch("linear");
    let cfg = write_config(
        &dir,
        "linear.toml",
        "kind = \"linear\"\ncoefficient = 1.0",
        65,
    );
    let out = dir.join("out");
    for which in ["coupled", "rlaplace"] {
        let (code, _, _) = run(&[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--which",
            which,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{which}");
        let summary = Summary::read(&out.join(format!("{which}.summary.txt"))).unwrap();
        assert!(
            (summary.get_f64("lambda").unwrap() - 1.0).abs() <= 1e-10,
            "{which}"
        );
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn quadratic_fixture_matches_committed_reference() {
    let out = scratch("regression");
    let (code, _, _) = run(&[
        "solve",
        "--config",
        fixture("quadratic.toml").to_str().unwrap(),
        "--which",
        "coupled",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let got = Summary::read(&out.join("coupled.summary.txt")).unwrap();
    let reference = Summary::read(&fixture("quadratic.reference.summary.txt")).unwrap();
    // lambda reproduces the committed value well below truncation error;
    // the loose tolerance absorbs cross-platform rounding.
    assert!(
        (got.get_f64("lambda").unwrap() - reference.get_f64("lambda").unwrap()).abs() <= 1e-9
    );
    assert_eq!(got.get("n"), reference.get("n"));
    assert!((got.get_f64("mass").unwrap() - 1.0).abs() <= 1e-9);
    assert!(got.get_f64("final_residual").unwrap() <= 1e-10);
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn transform_round_trip_is_identity_through_files() {
    let out = scratch("roundtrip");
    let cfg_path = fixture("quadratic.toml");
    let cfg = cfg_path.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    assert_eq!(run(&["solve", "--config", cfg, "--which", "rlaplace", "--out", out_s]).0, 0);
    assert_eq!(
        run(&["transform", "--config", cfg, "--direction", "inverse", "--out", out_s]).0,
        0
    );
    let inverse_csv = out.join("inverse.csv");
    assert_eq!(
        run(&[
            "transform",
            "--config",
            cfg,
            "--direction",
            "forward",
            "--out",
            out_s,
            "--input",
            inverse_csv.to_str().unwrap(),
        ])
        .0,
        0
    );
    let (_, phi0) = read_csv(&out.join("rlaplace.csv")).unwrap();
    let (_, phi1) = read_csv(&out.join("forward.csv")).unwrap();
    let sup = phi0[1]
        .iter()
        .zip(&phi1[1])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(sup <= 1e-12, "round trip sup {sup}");
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn corrupted_density_fails_alignment_with_exit_3() {
    let out = scratch("corrupt");
    let cfg_path = fixture("quadratic.toml");
    let cfg = cfg_path.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    assert_eq!(run(&["solve", "--config", cfg, "--which", "coupled", "--out", out_s]).0, 0);

    // Perturb m by 1% alternating noise, renormalized so the table still
    // loads as a probability density.
    let (_, cols) = read_csv(&out.join("coupled.csv")).unwrap();
    let (x, u, m) = (&cols[0], &cols[1], &cols[2]);
    let noisy: Vec<f64> = m
        .iter()
        .enumerate()
        .map(|(i, v)| v * if i % 2 == 0 { 1.01 } else { 0.99 })
        .collect();
    let h = x[1] - x[0];
    let mass: f64 = noisy
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = if i == 0 || i == noisy.len() - 1 { 0.5 * h } else { h };
            c * v
        })
        .sum();
    let renorm: Vec<f64> = noisy.iter().map(|v| v / mass).collect();
    write_csv(&out.join("coupled.csv"), &[("x", x), ("u", u), ("m", &renorm)]).unwrap();

    let (code, _, stderr) =
        run(&["transform", "--config", cfg, "--direction", "forward", "--out", out_s]);
    assert_eq!(code, 3, "stderr: {stderr}");
    // The flux report is still written for inspection.
    assert!(out.join("alignment_flux.csv").exists());
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn verify_passes_on_converged_solution_and_catches_wrong_nu() {
    let out = scratch("verify");
    let cfg_path = fixture("quadratic.toml");
    let cfg = cfg_path.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    assert_eq!(run(&["solve", "--config", cfg, "--which", "coupled", "--out", out_s]).0, 0);
    assert_eq!(run(&["verify", "--config", cfg, "--out", out_s]).0, 0);

    // Same solution files, mismatched viscosity: residuals jump to O(1).
    let text = std::fs::read_to_string(&cfg_path).unwrap();
    let wrong = out.join("wrong_nu.toml");
    std::fs::write(&wrong, text.replace("nu = 1.0", "nu = 2.0")).unwrap();
    let (code, _, _) = run(&["verify", "--config", wrong.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code, 4);
    let report = Summary::read(&out.join("verify.summary.txt")).unwrap();
    assert_eq!(report.get("all_pass"), Some("false"));
    assert!(report.get_f64("coupled.hjb-pointwise.sup").unwrap() > 0.1);
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn config_errors_exit_1() {
    let dir = scratch("badcfg");
    // Missing file.
    assert_eq!(run(&["solve", "--config", "/nonexistent.toml", "--which", "coupled"]).0, 1);
    // Both r and r_conj given.
    let bad = dir.join("bad.toml");
    std::fs::write(
        &bad,
        r#"[domain]
kind = "interval"
a = 0.0
b = 1.0

[hamiltonian]
nu = 1.0
r = 2.0
r_conj = 2.0
h0 = 1.0

[coupling]
kind = "zero"
"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&["solve", "--config", bad.to_str().unwrap(), "--which", "coupled"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("exactly one of r / r_conj"), "{stderr}");
    // Unknown verb.
    assert_eq!(run(&["frobnicate", "--config", bad.to_str().unwrap()]).0, 1);
    // Missing required flag.
    assert_eq!(run(&["solve", "--config", bad.to_str().unwrap()]).0, 1);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn sweep_reports_exact_orders_for_zero_coupling() {
    let dir = scratch("sweepzero");
    let cfg = write_config(&dir, "zero.toml", "kind = \"zero\"", 65);
    let out = dir.join("out");
    let (code, stdout, _) = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--grids",
        "33,65",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("order_m = exact"), "{stdout}");
    let summary = Summary::read(&out.join("sweep.summary.txt")).unwrap();
    assert_eq!(summary.get("order_m"), Some("exact"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn radial_fixture_sweep_has_first_order_rates() {
    let out = scratch("sweepradial");
    let (code, _, _) = run(&[
        "sweep",
        "--config",
        fixture("radial_cubic.toml").to_str().unwrap(),
        "--grids",
        "65,129,257",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let summary = Summary::read(&out.join("sweep.summary.txt")).unwrap();
    assert!(summary.get_f64("order_m").unwrap() >= 0.9);
    assert!(summary.get_f64("order_du").unwrap() >= 0.9);
    std::fs::remove_dir_all(out).ok();
}

#[test]
fn binary_runs_are_byte_identical() {
    let cfg_path = fixture("quadratic.toml");
    let cfg = cfg_path.to_str().unwrap();
    let out_a = scratch("det-a");
    let out_b = scratch("det-b");
    for out in [&out_a, &out_b] {
        let s = out.to_str().unwrap();
        assert_eq!(run(&["solve", "--config", cfg, "--which", "coupled", "--out", s]).0, 0);
        assert_eq!(run(&["solve", "--config", cfg, "--which", "rlaplace", "--out", s]).0, 0);
        assert_eq!(run(&["transform", "--config", cfg, "--direction", "forward", "--out", s]).0, 0);
    }
    for name in ["coupled.csv", "rlaplace.csv", "forward.csv", "alignment_flux.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    std::fs::remove_dir_all(out_a).ok();
    std::fs::remove_dir_all(out_b).ok();
}
