//! End-to-end checks of the `su11` binary: exit codes, output files,
//! determinism, and the replot path. Configs here are deliberately tiny so
//! the whole suite stays fast.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use assert_cmd::prelude::*;
use predicates::prelude::*;

fn su11() -> Command {
    Command::cargo_bin("su11").expect("binary builds")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const GROWTH: &str = r#"
schema_version = 1

[modes]
gamma_s_hz = 0.0955
gamma_i_hz = 0.0955

[grid]
mu = [2.0, 3.0, 5.0]
seed_amp = [0.03]

[run]
ensemble = 6
"#;

const TRANSIENT: &str = r#"
schema_version = 1

[modes]
gamma_s_hz = 0.0955
gamma_i_hz = 0.0955

[drive]
mu = 30.0
mu_spread = 3.0

[run]
ensemble = 6
"#;

#[test]
fn dry_run_validates_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "phase.toml",
        r#"
schema_version = 1
[grid]
mu = [0.5, 2.0]
[run]
ensemble = 4
tau_m = 10.0
"#,
    );
    let out = tmp.path().join("never-created");
    su11()
        .args(["phase-diagram", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--dry-run")
        .assert()
        .success()
        .stdout(predicate::str::contains("dry run"));
    assert!(!out.exists(), "dry run must not touch the output directory");
}

#[test]
fn invalid_config_reports_every_problem_and_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        r#"
schema_version = 1
[grid]
mu = [0.5, 1.0]
[run]
ensemble = 1
dt = 10.0
"#,
    );
    su11()
        .args(["phase-diagram", "--config"])
        .arg(&cfg)
        .assert()
        .code(2)
        .stderr(
            predicate::str::contains("threshold")
                .and(predicate::str::contains("tau_m"))
                .and(predicate::str::contains("ensemble"))
                .and(predicate::str::contains("dt")),
        );
}

#[test]
fn growth_run_writes_dataset_and_figures() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "growth.toml", GROWTH);
    let out = tmp.path().join("out");
    su11()
        .args(["growth-law", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    for file in [
        "dataset.csv",
        "dataset.json",
        "fig_growth_amplitude.svg",
        "fig_growth_rate.svg",
    ] {
        assert!(out.join(file).is_file(), "missing {file}");
    }
    let csv = fs::read_to_string(out.join("dataset.csv")).unwrap();
    assert!(csv.starts_with("mu0,quantity,value,std_error\n"));
    assert!(csv.contains("growth_rate_mc"));
    assert!(csv.contains("amplitude_exponent_fit"));
}

#[test]
fn identical_config_and_seed_reproduce_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "growth.toml", GROWTH);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        su11()
            .args(["growth-law", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .assert()
            .success();
    }
    for file in ["dataset.csv", "dataset.json", "fig_growth_rate.svg"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file} differs between identical runs"
        );
    }
}

#[test]
fn seed_override_changes_the_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "growth.toml", GROWTH);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    su11()
        .args(["growth-law", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&a)
        .assert()
        .success();
    su11()
        .args(["growth-law", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .args(["--seed", "7"])
        .assert()
        .success();
    assert_ne!(
        fs::read(a.join("dataset.csv")).unwrap(),
        fs::read(b.join("dataset.csv")).unwrap(),
        "a different base seed must change the sampled values"
    );
}

#[test]
fn replot_rebuilds_identical_figures_without_resimulating() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "growth.toml", GROWTH);
    let out = tmp.path().join("out");
    su11()
        .args(["growth-law", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success();
    let fig = out.join("fig_growth_amplitude.svg");
    let original = fs::read(&fig).unwrap();
    let csv_before = fs::read(out.join("dataset.csv")).unwrap();
    fs::remove_file(&fig).unwrap();

    su11().arg("replot").arg("--data").arg(&out).assert().success();

    assert_eq!(fs::read(&fig).unwrap(), original, "replotted figure differs");
    assert_eq!(
        fs::read(out.join("dataset.csv")).unwrap(),
        csv_before,
        "replot must not rewrite the dataset"
    );
}

#[test]
fn replot_missing_dataset_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    su11()
        .arg("replot")
        .arg("--data")
        .arg(tmp.path().join("nowhere.json"))
        .assert()
        .code(3);
}

#[test]
fn transient_reports_the_deepest_squeezing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "transient.toml", TRANSIENT);
    let out = tmp.path().join("out");
    su11()
        .args(["transient-squeeze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .assert()
        .success()
        .stdout(predicate::str::contains("deepest squeezing"));
    let csv = fs::read_to_string(out.join("dataset.csv")).unwrap();
    assert!(csv.contains("min_squeezing_db"));
    assert!(csv.contains("squeezed_analytic_mu_hi"));
    assert!(csv.contains("thermal_variance_mc"));
}

#[test]
fn runs_override_shrinks_the_ensemble() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "growth.toml", GROWTH);
    let out = tmp.path().join("out");
    su11()
        .args(["growth-law", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--runs", "4", "--dry-run"])
        .assert()
        .success()
        .stdout(predicate::str::contains("4 runs"));
}
