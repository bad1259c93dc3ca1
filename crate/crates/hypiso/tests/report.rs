//! End-to-end runs of the `hypiso` binary.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hypiso(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hypiso"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .env("HYPISO_THREADS", "1")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_rows_match_cap_closed_forms() {
    let dir = TempDir::new().unwrap();
    let out = hypiso(
        dir.path(),
        "[sweep]\nthetas = [0.5235987755982988, 1.5707963267948966]\n",
        &["sweep-theta"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(dir.path(), "sweep.csv");
    assert_eq!(
        text.lines().next().unwrap(),
        "theta,vol_sigma,vol_boundary,linear_slack,classical_status,reverse_slack"
    );
    let rows = csv_rows(&text);
    let num = |s: &str| s.parse::<f64>().unwrap();
    assert!((num(&rows[0][1]) - 1.047198).abs() < 1e-6);
    assert!((num(&rows[0][2]) - 3.141593).abs() < 1e-6);
    assert_eq!(rows[0][4], "not-applicable");
    assert!(num(&rows[1][3]).abs() < 1e-8 && num(&rows[1][5]).abs() < 1e-8);
    assert_eq!(rows[1][4], "pass");
    assert_eq!(
        json(dir.path(), "report.json")["schema"],
        "hypiso-report-v1"
    );
}

#[test]
fn monotonicity_of_disk_is_flat_and_corruption_fails() {
    let dir = TempDir::new().unwrap();
    let config = "[measure]\ngrid_size = 12\n";
    let out = hypiso(dir.path(), config, &["monotonicity"]);
    assert_eq!(out.status.code(), Some(0));
    let text = read(dir.path(), "monotonicity.csv");
    assert_eq!(text.lines().next().unwrap(), "r,ratio");
    for row in csv_rows(&text) {
        assert!((row[1].parse::<f64>().unwrap() - PI).abs() < 1e-8);
    }

    let corrupted = format!("{config}\n[perturb_curve]\nindex = 5\ndelta = -1e-3\n");
    let out = hypiso(dir.path(), &corrupted, &["monotonicity"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(dir.path(), "report.json");
    assert_eq!(report["verdicts"][0]["pass"], false);
}

#[test]
fn mobius_of_great_circle_and_nonconvergence() {
    let dir = TempDir::new().unwrap();
    let out = hypiso(
        dir.path(),
        "[optimizer]\nrestarts = 3\n",
        &["mobius", "--target", "boundary", "--history"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = json(dir.path(), "mobius.json");
    assert!((result["value"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-4);
    let history = read(dir.path(), "mobius_history.csv");
    assert!(history.starts_with("restart,a1,a2,a3,volume,best_so_far"));

    // two evaluations cannot converge; the result is still written
    let config = "[family]\nkind = \"cap\"\nk = 2\nn = 3\ntheta = 0.5\n\n[optimizer]\nrestarts = 1\nmax_evaluations = 2\n";
    let out = hypiso(dir.path(), config, &["mobius"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(dir.path(), "mobius.json")["converged"], false);
}

const DISK_CHECKS: &str = r#"
seed = 9
verdicts = ["LinearIsop", "ClassicalIsop", "ReverseTG", "VolumeLowerBound", "LaplacianLemma", "MobiusBoundary"]

[measure]
laplacian_samples = 20

[optimizer]
restarts = 2
"#;

#[test]
fn verify_all_on_disk_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let out = hypiso(dir.path(), DISK_CHECKS, &["verify-all"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = read(dir.path(), "report.json");
    let report: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(report["verdicts"].as_array().unwrap().len(), 6);
    assert!(report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["pass"] == true));
    assert_eq!(
        json(dir.path(), "submanifold.json")["schema"],
        "hypiso-submanifold-v1"
    );

    let out = hypiso(dir.path(), DISK_CHECKS, &["verify-all"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(first, read(dir.path(), "report.json"));
    // floats carry 17 significant digits
    assert!(first.contains("3.1415926535897931e+0"));
}

#[test]
fn verify_all_union_uses_density_two() {
    let dir = TempDir::new().unwrap();
    let config = r#"
verdicts = ["MobiusDensity", "VolumeLowerBound"]

[family]
kind = "union"

[[family.parts]]
kind = "disk"
k = 2
n = 3

[[family.parts]]
kind = "disk"
k = 2
n = 3
normal = [0.6, 0.0, 0.8]

[optimizer]
restarts = 2
"#;
    let out = hypiso(dir.path(), config, &["verify-all"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(dir.path(), "report.json");
    let density = report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["theorem_id"] == "MobiusDensity")
        .unwrap();
    assert!((density["lhs"].as_f64().unwrap() - 4.0 * PI).abs() < 1e-4);
    assert!(density["notes"]
        .as_str()
        .unwrap()
        .contains("density 2.0000"));
}

#[test]
fn verify_all_corrupted_curve_exits_one() {
    let dir = TempDir::new().unwrap();
    let config = "verdicts = [\"Monotonicity\"]\n\n[measure]\ngrid_size = 10\n\n[perturb_curve]\nindex = 4\ndelta = -1e-3\n";
    let out = hypiso(dir.path(), config, &["verify-all"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_exit_two_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let out = hypiso(
        dir.path(),
        "[family]\nkind = \"cap\"\nk = 2\nn = 3\ntheta = 2.0\n",
        &["verify-all"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));

    let out = hypiso(
        dir.path(),
        "[sweep]\nthetas = [0.3]\n",
        &["sweep-theta", "--truncation", "0.5"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));

    let out = hypiso(dir.path(), "this is = = not toml", &["sweep-theta"]);
    assert_eq!(out.status.code(), Some(2));
}
