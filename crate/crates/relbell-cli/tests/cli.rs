//! End-to-end tests of the `relbell` binary: exit codes, CSV contract,
//! flag behavior, and the shipped example configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

const SQRT_8: f64 = 2.0 * std::f64::consts::SQRT_2;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relbell"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Fresh scratch directory per call; unique across parallel tests.
fn scratch_dir() -> PathBuf {
    static COUNTER: AtomicU32 = AtomicU32::new(0);
    let dir = std::env::temp_dir().join(format!(
        "relbell-cli-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).expect("scratch dir creates");
    dir
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

/// Rows after the comment header and the column-name line.
fn data_rows(doc: &str) -> Vec<Vec<f64>> {
    doc.lines()
        .skip(2)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn shipped_configs_run_under_their_subcommands() {
    for (cmd, file) in [
        ("sphere-sweep", "sphere-sweep.toml"),
        ("cone-sweep", "cone-sweep.toml"),
        ("boosted-cone-sweep", "boosted-cone-sweep.toml"),
        ("optimize", "optimize.toml"),
        ("compensate", "compensate.toml"),
    ] {
        let config = repo_config(file);
        // Thin the grids so every scenario finishes quickly while still
        // exercising the full parse-validate-run-render path.
        let out = run(&[
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--grid-theta",
            "3",
            "--grid-phi",
            "3",
            "--quad-theta",
            "16",
            "--quad-phi",
            "32",
        ]);
        assert!(out.status.success(), "{cmd} failed: {}", stderr(&out));
        assert!(stdout(&out).lines().count() > 2, "{cmd}: no data rows");
    }
}

#[test]
fn header_carries_scenario_and_config_hash() {
    let out = run(&[
        "cone-sweep",
        "--speed-b",
        "0.9",
        "--grid-theta",
        "3",
        "--quad-theta",
        "16",
        "--quad-phi",
        "32",
    ]);
    assert!(out.status.success());
    let doc = stdout(&out);
    let mut lines = doc.lines();
    let header = lines.next().unwrap();
    let prefix = "# relbell v1 scenario=cone-sweep config-sha256=";
    assert!(header.starts_with(prefix), "header = {header}");
    let hash = &header[prefix.len()..];
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(
        lines.next().unwrap(),
        "speed_b,theta_prime_deg,s_literal,s_correlators"
    );
    assert!(!doc.contains('\r'), "LF line endings only");
    assert!(doc.ends_with('\n'));

    // A different effective config must hash differently.
    let other = run(&[
        "cone-sweep",
        "--speed-b",
        "0.5",
        "--grid-theta",
        "3",
        "--quad-theta",
        "16",
        "--quad-phi",
        "32",
    ]);
    let other_doc = stdout(&other);
    assert_ne!(
        doc.lines().next().unwrap(),
        other_doc.lines().next().unwrap()
    );
}

#[test]
fn file_output_matches_stdout_output() {
    let dir = scratch_dir();
    let path = dir.join("cone.csv");
    let args_base = [
        "cone-sweep",
        "--speed-b",
        "0.99",
        "--grid-theta",
        "4",
        "--quad-theta",
        "16",
        "--quad-phi",
        "32",
    ];
    let to_stdout = run(&args_base);
    let mut args_file: Vec<&str> = args_base.to_vec();
    args_file.extend(["--out", path.to_str().unwrap()]);
    let to_file = run(&args_file);
    assert!(to_stdout.status.success() && to_file.status.success());
    // Byte-identical including the header: the hash covers the parameters,
    // not the destination.
    assert_eq!(stdout(&to_stdout), fs::read_to_string(&path).unwrap());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn near_rest_sphere_sweep_is_flat_at_the_quantum_bound() {
    let out = run(&[
        "sphere-sweep",
        "--speed-b",
        "1e-9",
        "--grid-theta",
        "5",
        "--grid-phi",
        "5",
    ]);
    assert!(out.status.success());
    let doc = stdout(&out);
    let rows = data_rows(&doc);
    assert_eq!(rows.len(), 25);
    for line in doc.lines().skip(2) {
        assert!(
            line.ends_with(",2.828427124746"),
            "expected the quantum bound, got {line}"
        );
    }
}

#[test]
fn emitted_s_values_stay_within_the_quantum_bound() {
    let out = run(&[
        "boosted-cone-sweep",
        "--grid-theta",
        "5",
        "--quad-theta",
        "16",
        "--quad-phi",
        "32",
    ]);
    assert!(out.status.success());
    for row in data_rows(&stdout(&out)) {
        for &s in &row[2..] {
            assert!((0.0..=SQRT_8 + 1e-9).contains(&s), "S = {s}");
        }
    }
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["cone-sweep", "--bogus-flag"],
        vec!["sphere-sweep", "--speed-b", "1.5"],
        vec!["sphere-sweep", "--speed-b", "0"],
        vec!["boosted-cone-sweep", "--beta", "1.0"],
        vec!["cone-sweep", "--quad-theta", "1"],
        vec!["cone-sweep", "--theta-prime-max", "-5"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: {}",
            stderr(&out)
        );
    }
}

#[test]
fn malformed_and_mismatched_configs_exit_2() {
    let dir = scratch_dir();
    let bad = dir.join("bad.toml");
    fs::write(&bad, "[physics]\nspeed = 0.5\n").unwrap();
    let out = run(&["cone-sweep", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("parse"), "stderr: {}", stderr(&out));

    // A config tagged for one scenario refuses to run under another.
    let out = run(&[
        "cone-sweep",
        "--config",
        repo_config("optimize.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("tagged"), "stderr: {}", stderr(&out));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn compensate_rejects_targets_not_orthogonal_to_the_boost() {
    let dir = scratch_dir();
    let cfg = dir.join("comp.toml");
    fs::write(
        &cfg,
        "scenario = \"compensate\"\n\n[physics]\nbeta = 0.9\n\n[compensate]\nv_com = [0.5, 0.0, 0.0]\ntargets = [[0.0, 1.0, 0.5]]\n",
    )
    .unwrap();
    let out = run(&["compensate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("orthogonal"),
        "stderr: {}",
        stderr(&out)
    );
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn io_failures_exit_4_and_name_the_path() {
    let out = run(&["cone-sweep", "--config", "/no/such/config.toml"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("/no/such/config.toml"));

    let out = run(&["compensate", "--out", "/no/such/directory/result.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("/no/such/directory/result.csv"));
}

#[test]
fn compensate_reports_rounding_level_residuals() {
    let out = run(&[
        "compensate",
        "--config",
        repo_config("compensate.toml").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    for row in rows {
        let residual = row[6];
        assert!(residual.abs() <= 1e-9, "residual = {residual}");
    }
}

#[test]
fn optimize_pointwise_hits_the_quantum_bound_via_the_cli() {
    let out = run(&["optimize", "--theta-prime-max", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc = stdout(&out);
    // Last column is a boolean, so parse just the leading best_s cell.
    let row = doc.lines().nth(2).unwrap();
    let best_s: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!((best_s - SQRT_8).abs() < 1e-6, "best_s = {best_s}");
    assert!(row.ends_with(",true"), "row = {row}");
}
