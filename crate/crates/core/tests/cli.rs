use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lean_pet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lean-pet"))
        .args(args)
        .current_dir(dir)
        .env_remove("LEANPET_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cell.cfg");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn body_of(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).collect::<Vec<_>>().join("\n")
}

const DISCHARGE: &str = "[run]\nprotocol = discharge\nseed = 4\n\n[discharge]\nrates = 1\npoints = 50\n";

#[test]
fn discharge_run_writes_reproducible_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), DISCHARGE);
    for out in ["a", "b"] {
        let run = lean_pet(&["run", &cfg, "--output", out], tmp.path());
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let a = tmp.path().join("a/discharge_1C.csv");
    let text = std::fs::read_to_string(&a).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# lean-pet "), "{first}");
    assert!(first.ends_with(" seed=4"), "{first}");
    assert_eq!(body_of(&a), body_of(&tmp.path().join("b/discharge_1C.csv")));
    let summary = std::fs::read_to_string(tmp.path().join("a/summary.txt")).unwrap();
    assert!(summary.contains("protocol: discharge"));
}

#[test]
fn overrides_change_the_config_hash() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), DISCHARGE);
    lean_pet(&["run", &cfg, "--output", "a"], tmp.path());
    let run = lean_pet(&["run", &cfg, "--output", "b", "--set", "cell.porosity=0.45"], tmp.path());
    assert!(run.status.success());
    let header = |d: &str| {
        let text = std::fs::read_to_string(tmp.path().join(d).join("discharge_1C.csv")).unwrap();
        text.lines().next().unwrap().to_string()
    };
    assert_ne!(header("a"), header("b"));
}

#[test]
fn groups_and_validate() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), DISCHARGE);
    let groups = lean_pet(&["groups", &cfg], tmp.path());
    assert!(groups.status.success());
    let stdout = String::from_utf8_lossy(&groups.stdout);
    assert!(stdout.contains("1C") && stdout.contains("small-signal"), "{stdout}");
    let validate = lean_pet(&["validate", &cfg], tmp.path());
    assert!(validate.status.success());
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[cell]\nporosity = abc\n");
    let out = lean_pet(&["validate", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let cfg = write_config(tmp.path(), "[ocp]\nfile = missing.csv\n");
    let out = lean_pet(&["validate", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    let cfg = write_config(tmp.path(), "[cell]\nporosity = 1.5\n");
    assert_eq!(lean_pet(&["validate", &cfg], tmp.path()).status.code(), Some(2));
}

#[test]
fn thread_count_must_be_positive() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), DISCHARGE);
    let out = Command::new(env!("CARGO_BIN_EXE_lean-pet"))
        .args(["validate", &cfg])
        .env("LEANPET_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_lean-pet"))
        .args(["validate", &cfg])
        .env("LEANPET_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn small_sweep_writes_one_row_per_point() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[run]\nseed = 1\n");
    let out = lean_pet(
        &["sweep", &cfg, "--axis", "rate=1", "--axis", "solid_conductivity=0.1,1", "--output", "s"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(tmp.path().join("s/sweep_rmse.csv")).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
}
