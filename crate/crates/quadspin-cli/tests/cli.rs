//! Command-line surface checks: subcommands, outputs, and exit codes.

use std::path::Path;
use std::process::Command;

fn quadspin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadspin"))
}

fn line_count(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn simulate_preset_writes_trajectory_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["simulate", "--preset", "na23", "--windows", "1,11", "--samples-per-window", "17"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = dir.path().join("trajectory.csv");
    // schema comment + header + 2 windows x 17 samples
    assert_eq!(line_count(&csv), 2 + 2 * 17);
    let echo = std::fs::read_to_string(dir.path().join("config_echo.toml")).unwrap();
    assert!(echo.contains("j0_ns = 14.0"));
    assert!(echo.contains("c_q_hz2 = 12000000000.0"));
    assert!(echo.contains("nu_q_hz = 16700.0"));
}

#[test]
fn simulate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        r#"
preset = "cs133"
relaxation_enabled = false
[grid]
kind = "uniform"
t_end = 1.0e-5
samples = 9
"#,
    )
    .unwrap();
    let out = quadspin()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(line_count(&dir.path().join("trajectory.csv")), 2 + 9);
}

#[test]
fn simulate_rejects_bad_config_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "preset = \"na23\"\nbogus = 1\n").unwrap();
    let out = quadspin()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_requires_preset_or_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["simulate", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_validation_error() {
    let out = quadspin().args(["simulate", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn wigner_writes_grid_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["wigner", "--preset", "na23", "--time", "1.0e-5", "--grid", "21x41", "--svg"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(line_count(&dir.path().join("wigner.csv")), 1 + 21 * 41);
    let svg = std::fs::read_to_string(dir.path().join("wigner.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn wigner_rejects_malformed_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["wigner", "--preset", "na23", "--time", "0.0", "--grid", "nonsense"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_writes_linear_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let out = quadspin()
        .args(["bounds", "--spins", "1/2,1,3/2,2,5/2,3,7/2,4,9/2"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 9);
    assert!(text.starts_with("two_i,spin,xi_sq_eq,"));
    // Spot check the spin-7/2 row: xi_sq_eq = 3, neff_loss = 4.
    let row: Vec<&str> = text.lines().find(|l| l.starts_with("7,")).unwrap().split(',').collect();
    let xi_sq: f64 = row[2].parse().unwrap();
    let loss: f64 = row[6].parse().unwrap();
    assert!((xi_sq - 3.0).abs() < 1e-14);
    assert!((loss - 4.0).abs() < 1e-14);
}

#[test]
fn bounds_rejects_bad_spin_token() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["bounds", "--spins", "1/3"])
        .arg("--out")
        .arg(dir.path().join("b.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cat_shorthand_produces_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .args(["cat", "--preset", "na23"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["trajectory.csv", "wigner.csv", "wigner.svg"] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    // The final trajectory row is the cat instant: purity 1, neff_p = 2I.
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    let neff_p: f64 = last[15].parse().unwrap();
    let purity: f64 = last[17].parse().unwrap();
    assert!((neff_p - 3.0).abs() < 1e-6);
    assert!((purity - 1.0).abs() < 1e-10);
}

#[test]
fn thread_cap_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = quadspin()
        .env("QUADSPIN_THREADS", "1")
        .args(["simulate", "--preset", "na23", "--windows", "1", "--samples-per-window", "9"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(line_count(&dir.path().join("trajectory.csv")), 2 + 9);
}
