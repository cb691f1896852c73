//! End-to-end runs of the `overlap` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn overlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overlap"))
        .args(args)
        .output()
        .expect("spawn overlap")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("overlap-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn usage_and_config_errors_exit_with_2() {
    assert_eq!(overlap(&["table1", "--methods", ""]).status.code(), Some(2));
    assert_eq!(
        overlap(&["table1", "--methods", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(overlap(&["overlap", "--tau", "3"]).status.code(), Some(2));
    assert_eq!(overlap(&["figure", "7"]).status.code(), Some(2));
    assert_eq!(
        overlap(&["table2", "--methods", "fluid"]).status.code(),
        Some(2)
    );

    let dir = scratch("bad-config");
    let path = dir.join("model.json");
    fs::write(&path, "{ \"servers\": 30, ").unwrap();
    let out = overlap(&["overlap", "--config", path.to_str().unwrap(), "--tau", "3"]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn short_horizon_exits_with_3() {
    let dir = scratch("horizon");
    let path = dir.join("model.json");
    fs::write(
        &path,
        r#"{"servers": 30, "mu": 1.0,
            "arrival": {"kind": "sinusoidal", "alpha": 0.5, "beta": 0.5, "lambda": 1.0, "rho": 0.8}}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let out = overlap(&["overlap", "--config", cfg, "--tau", "6", "--horizon", "6.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));

    let ok = overlap(&[
        "overlap",
        "--config",
        cfg,
        "--tau",
        "3,6",
        "--methods",
        "fluid,adjusted",
    ]);
    assert!(ok.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(ok.stdout).unwrap());
    assert_eq!(
        header,
        ["tau", "fluid", "fluid_wait", "adjusted", "adjusted_wait"]
    );
    assert_eq!(rows.len(), 2);
    assert!((rows[1][1] - 48.64).abs() / 48.64 < 0.02);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn infinite_server_config_supports_closed_form() {
    let dir = scratch("inf");
    let path = dir.join("model.json");
    fs::write(
        &path,
        r#"{"servers": "inf", "mu": 1.0,
            "arrival": {"kind": "sinusoidal", "alpha": 0.5, "beta": 2.0, "lambda": 10.0}}"#,
    )
    .unwrap();
    let out = overlap(&[
        "overlap",
        "--config",
        path.to_str().unwrap(),
        "--tau",
        "9",
        "--methods",
        "closed-form,numeric-ode",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert!((rows[0][1] - 8.39).abs() < 0.01);
    assert!((rows[0][1] - rows[0][2]).abs() < 1e-6);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn figures_written_to_output_directory() {
    let dir = scratch("figures");
    let out = dir.to_str().unwrap();
    for id in ["2", "3", "4"] {
        let r = overlap(&["figure", id, "--reps", "2000", "--out", out]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }

    let (header, rows) = csv_rows(&fs::read_to_string(dir.join("figure2.csv")).unwrap());
    assert_eq!(header, ["t", "sim_mean", "fluid", "adjusted"]);
    assert_eq!(rows.len(), 201);
    let worst = |j: usize| rows.iter().map(|r| (r[1] - r[j]).abs()).fold(0.0, f64::max);
    assert!(worst(3) < worst(2));

    let (header, rows) = csv_rows(&fs::read_to_string(dir.join("figure4.csv")).unwrap());
    assert_eq!(header, ["t", "analytical", "numerical", "sim_mean"]);
    assert!(rows.iter().all(|r| (r[1] - r[2]).abs() < 1e-6));

    for tau in [3, 5, 7, 9] {
        let text = fs::read_to_string(dir.join(format!("figure3_tau{tau}.csv"))).unwrap();
        let (header, rows) = csv_rows(&text);
        assert_eq!(header, ["bin_left", "bin_right", "count"]);
        assert_eq!(rows.iter().map(|r| r[2]).sum::<f64>(), 2000.0);
    }
    let (_, summary) = csv_rows(&fs::read_to_string(dir.join("figure3_summary.csv")).unwrap());
    assert!(summary.iter().all(|r| r[3] > 0.0));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn text_format_is_aligned_table() {
    let out = overlap(&["table2", "--methods", "closed-form", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("analytical"));
    assert!(text.contains("11.41"));
    assert!(text.lines().nth(2).unwrap().starts_with("---"));
}
