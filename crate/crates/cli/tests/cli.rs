use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinsurf"));
    cmd.env_remove("SPINSURF_OUT").current_dir(dir).args(args);
    if let Some(text) = config {
        fs::write(dir.join("run.toml"), text).unwrap();
        cmd.args(["--config", "run.toml"]);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

const PLANE: &str = "[surface]\npreset = \"plane\"\n[grid]\nn1 = 16\nn2 = 16\n[solve]\nk = 10\n";

#[test]
fn geometry_torus_report() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["geometry", "--out", "o", "--seed", "11"], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&tmp.path().join("o/geometry.csv"));
    assert_eq!(header, "q1,q2,g11,g12,g22,alpha1,alpha2,omega1,omega2,f_trace,f_det,geom_pot");
    assert_eq!(rows.len(), 256);
    let report = read_json(&tmp.path().join("o/geometry.json"));
    assert!(report["metric_identity"]["max_relative_deviation"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["config"]["seed"], 11);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn geometry_plane_is_flat() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["geometry", "--out", "o"], Some(PLANE));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, rows) = csv_rows(&tmp.path().join("o/geometry.csv"));
    for row in rows {
        for col in &row[5..] {
            assert_eq!(col, "0");
        }
    }
}

#[test]
fn degenerate_custom_chart_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[surface]\npreset = \"custom\"\nshape = \"fd_torus\"\nmajor = 1.0\nminor = 1.0\n[grid]\nn1 = 8\nn2 = 8\n";
    let out = run(tmp.path(), &["geometry"], Some(cfg));
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("degenerate chart at q = (3.14159"), "{}", stderr(&out));
}

#[test]
fn invalid_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["spectrum"], Some("[surface]\nmajor = 0.5\nminor = 1.0\n"));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("surface.major"));
    let out = run(tmp.path(), &["spectrum"], Some("[grid]\nn1 = 4\n"));
    assert_eq!(code(&out), 2);
    let out = run(tmp.path(), &["spectrum"], Some("[surface\n"));
    assert_eq!(code(&out), 2);
    let out = run(tmp.path(), &["gap-scan"], Some(PLANE));
    assert_eq!(code(&out), 2);
    let out = run(tmp.path(), &["spectrum", "--config", "missing.toml"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn plane_spectrum_matches_free_particle() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["spectrum", "--out", "o"], Some(PLANE));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&tmp.path().join("o/spectrum.csv"));
    assert_eq!(header, "index,block,eigenvalue,residual");
    let pos: Vec<f64> = rows.iter().filter(|r| r[1] == "positive").map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(pos.len(), 10);
    let exact = [10.0, 10.0, 10.05, 10.05, 10.05, 10.05, 10.05, 10.05, 10.05, 10.05];
    for (a, b) in pos.iter().zip(exact) {
        assert!((a - b).abs() < 2e-3, "{a} vs {b}");
    }
    let summary = read_json(&tmp.path().join("o/spectrum.json"));
    assert!(summary["diagnostics"]["hermiticity_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(summary["config"]["surface"]["preset"], "plane");
}

#[test]
fn zero_eigenpairs_writes_header_only() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["spectrum", "--out", "o"], Some("[grid]\nn1 = 8\nn2 = 8\n[solve]\nk = 0\n"));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(tmp.path().join("o/spectrum.csv")).unwrap(), "index,block,eigenvalue,residual\n");
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[grid]\nn1 = 12\nn2 = 12\n[solve]\nmode = \"iterative\"\nk = 4\n[output]\ndir = \"o\"\n";
    assert_eq!(code(&run(tmp.path(), &["spectrum"], Some(cfg))), 0);
    let first = fs::read(tmp.path().join("o/spectrum.csv")).unwrap();
    let first_json = fs::read(tmp.path().join("o/spectrum.json")).unwrap();
    assert_eq!(code(&run(tmp.path(), &["spectrum"], Some(cfg))), 0);
    assert_eq!(first, fs::read(tmp.path().join("o/spectrum.csv")).unwrap());
    assert_eq!(first_json, fs::read(tmp.path().join("o/spectrum.json")).unwrap());
    let leftovers: Vec<_> = fs::read_dir(tmp.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn output_directory_precedence() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[grid]\nn1 = 8\nn2 = 8\n[output]\ndir = \"from_config\"\n";
    fs::write(tmp.path().join("run.toml"), cfg).unwrap();
    let bin = env!("CARGO_BIN_EXE_spinsurf");
    let status = Command::new(bin)
        .current_dir(tmp.path())
        .env("SPINSURF_OUT", "from_env")
        .args(["geometry", "--config", "run.toml"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("from_env/geometry.csv").exists());
    let status = Command::new(bin)
        .current_dir(tmp.path())
        .env("SPINSURF_OUT", "from_env")
        .args(["geometry", "--config", "run.toml", "--out", "from_flag"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("from_flag/geometry.csv").exists());
    assert_eq!(code(&run(tmp.path(), &["geometry"], Some(cfg))), 0);
    assert!(tmp.path().join("from_config/geometry.csv").exists());
}

#[test]
fn solver_failure_exits_4() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[grid]\nn1 = 8\nn2 = 8\n[solve]\nmode = \"iterative\"\nmax_iter = 1\ntol = 1e-15\n";
    let out = run(tmp.path(), &["spectrum"], Some(cfg));
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn torus_gap_scan() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["gap-scan", "--out", "o"], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&tmp.path().join("o/gap_scan.csv"));
    assert_eq!(header, "theta,zeeman_coeff,spin_conn_coeff,doublet_splitting");
    assert_eq!(rows.len(), 16);
    let at = |i: usize, c: usize| rows[i][c].parse::<f64>().unwrap();
    assert!(at(0, 2).abs() < 1e-12 && at(8, 2).abs() < 1e-12);
    assert!(at(4, 1).abs() < 1e-12 && at(12, 1).abs() < 1e-12);
    let summary = read_json(&tmp.path().join("o/gap_scan.json"));
    assert_eq!(summary["max_geom_pot"], 0.0);
}

#[test]
fn fw_verify_scaling() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["fw-verify", "--out", "o"], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&tmp.path().join("o/fw_verify.csv"));
    assert_eq!(header, "m,steps,odd_residual");
    assert_eq!(rows.len(), 16);
    let summary = read_json(&tmp.path().join("o/fw_verify.json"));
    assert!(summary["slope"].as_f64().unwrap() <= -2.0);
    assert_eq!(summary["converged"], true);
    let strict = run(tmp.path(), &["fw-verify", "--out", "o"], Some("[fw]\nslope_max = -10.0\n"));
    assert_eq!(code(&strict), 5);
}

#[test]
fn fw_verify_small_mass_warns() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["fw-verify", "--out", "o"], Some("[fw]\nmasses = [0.1]\n"));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
    let summary = read_json(&tmp.path().join("o/fw_verify.json"));
    assert_eq!(summary["converged"], false);
    assert!(!summary["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn fw_verify_without_odd_part() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["fw-verify", "--out", "o"], Some("[fw]\ninput = \"free_mode\"\nmomentum = 0.0\n"));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, rows) = csv_rows(&tmp.path().join("o/fw_verify.csv"));
    assert!(rows.iter().all(|r| r[2] == "0"));
    let summary = read_json(&tmp.path().join("o/fw_verify.json"));
    assert!(summary["slope"].is_null());
    assert!(summary["slope_status"].as_str().unwrap().starts_with("undefined"));
}

#[test]
fn confinement_shift() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["compare-confinement", "--out", "o"], Some("[grid]\nn1 = 12\nn2 = 12\n"));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (header, rows) = csv_rows(&tmp.path().join("o/compare_confinement.csv"));
    assert_eq!(header, "index,block,harmonic,square_well,difference,expected");
    for r in &rows {
        let (d, e): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!((d - e).abs() < 1e-8);
    }
    let summary = read_json(&tmp.path().join("o/compare_confinement.json"));
    assert_eq!(summary["square_well_correction_zero"], true);
    assert!(summary["normal_spectra"]["linear"]["max_imaginary_part"].as_f64().unwrap() < 1e-8);
}
