use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quasilocal::runner::RunConfig;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasilocal"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn mass_of_schwarzschild_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["mass", "--preset", "schwarzschild", "--param", "m=0.01", "--band-limit", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("mass_report.json"));
    let m = 0.01;
    assert!((r["hawking"].as_f64().unwrap() - m).abs() < 1e-9);
    for key in ["first_order", "adm_closed_form"] {
        assert!((r[key].as_f64().unwrap() - m).abs() <= 10.0 * m * m, "{key}");
    }
    for f in r["adm_flux"].as_array().unwrap() {
        assert!((f["mass"].as_f64().unwrap() - r["first_order"].as_f64().unwrap()).abs() < 1e-10);
    }
    assert_eq!(r["refused"], false);
}

#[test]
fn round_preset_has_zero_masses() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["mass", "--band-limit", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&dir.path().join("mass_report.json"));
    for key in ["hawking", "first_order", "adm_closed_form"] {
        assert!(r[key].as_f64().unwrap().abs() <= 1e-10, "{key}");
    }
}

#[test]
fn large_data_is_reported_as_refused() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mass", "--preset", "random", "--param", "epsilon=0.5", "--epsilon-threshold", "0.1", "--band-limit", "6"];
    let out = run(dir.path(), &args);
    assert_eq!(out.status.code(), Some(3));
    let r = json(&dir.path().join("mass_report.json"));
    assert_eq!(r["refused"], true);
    assert!(r["adm_closed_form"].is_null());
}

#[test]
fn extend_writes_residual_csv_with_quadratic_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["extend", "--preset", "random", "--band-limit", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("epsilon,static_sup,boundary_metric_sup,boundary_H_sup"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        let slope = |c: usize| (w[0][c] / w[1][c]).log10() / (w[0][0] / w[1][0]).log10();
        assert!((slope(1) - 2.0).abs() < 0.15 && (slope(3) - 2.0).abs() < 0.15);
    }
    assert!(dir.path().join("extension.txt").exists());
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["small-sphere", "--preset", "quartic", "--band-limit", "6", "--seed", "4"];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &args).status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("small_sphere.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn euclidean_sweep_is_massless() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["small-sphere", "--preset", "euclidean", "--band-limit", "6"]).status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("small_sphere.csv")).unwrap();
    for line in csv.lines().skip(2) {
        let mass: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(mass.abs() < 1e-13);
    }
}

#[test]
fn poisson_test_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["poisson-test"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(dir.path().join("poisson_solution.txt")).unwrap().starts_with("RADIAL"));
}

#[test]
fn validate_passes_and_fault_names_parseval() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["validate"]).status.code(), Some(0));
    let out = run(dir.path(), &["validate", "--fault", "corrupt-weights"]);
    assert_eq!(out.status.code(), Some(4));
    let report = fs::read_to_string(dir.path().join("validate_report.txt")).unwrap();
    assert!(report.lines().any(|l| l.starts_with("FAIL parseval")));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["mass", "--preset", "nonsense"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[grid]\nband_limit = 8\nbogus line\n").unwrap();
    let out = run(dir.path(), &["mass", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default().with_band_limit(6);
    c.preset = "schwarzschild".into();
    c.params.insert("m".into(), 0.001);
    c.flux_radii = vec![5.0];
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, c.to_text()).unwrap();
    assert_eq!(run(dir.path(), &["mass", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let r = json(&dir.path().join("mass_report.json"));
    assert_eq!(r["adm_flux"].as_array().unwrap().len(), 1);
    assert!((r["hawking"].as_f64().unwrap() - 0.001).abs() < 1e-12);
}
