use std::path::Path;
use std::process::{Command, Output};

use wcdma_cac_cli::config::DEFAULT_CONFIG;

fn wcdma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wcdma-cac"))
        .args(args)
        .output()
        .expect("failed to run wcdma-cac")
}

fn stdout(args: &[&str]) -> String {
    let out = wcdma(args);
    assert!(
        out.status.success(),
        "wcdma-cac {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn commands_are_byte_stable() {
    for args in [
        &["ber-curve"][..],
        &["capacity", "--service", "voice"],
        &["admit-sim", "--seed", "7"],
        &["admit-sim"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn csv_shape() {
    let csv = stdout(&["admit-sim"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("policy,n_offered,blocked_percent,total_load")
    );
    assert!(csv.ends_with('\n') && !csv.ends_with("\n\n"));
    assert!(lines.all(|l| !l.ends_with(',') && l.split(',').count() == 4));
    assert_eq!(csv.matches("policy,").count(), 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.csv");
    let out = wcdma(&[
        "capacity",
        "--service",
        "video",
        "--max-users",
        "12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        csv,
        stdout(&["capacity", "--service", "video", "--max-users", "12"])
    );
    assert_eq!(csv.lines().count(), 1 + 3 * 12);
}

#[test]
fn preset_changes_voice_load() {
    let figures = stdout(&[
        "capacity",
        "--service",
        "voice",
        "--scheme",
        "uncoded",
        "--max-users",
        "150",
    ]);
    let table = stdout(&[
        "--preset",
        "table1",
        "capacity",
        "--service",
        "voice",
        "--scheme",
        "uncoded",
        "--max-users",
        "150",
    ]);
    let last = |csv: &str| -> f64 {
        csv.lines()
            .last()
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((last(&figures) - 0.9708).abs() < 5e-4);
    // 150 users at v = 0.58
    assert!((last(&table) - 0.9708 * 0.58 / 0.67).abs() < 5e-4);
}

#[test]
fn rule_flag() {
    let csv = stdout(&[
        "capacity",
        "--service",
        "voice",
        "--max-users",
        "1",
        "--rule",
        "admit-if-old-below",
    ]);
    let caps: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(caps, ["109", "137", "160"]);
}

#[test]
fn video_only_partition_against_shared() {
    let text = DEFAULT_CONFIG
        .replace(
            "partitions = { voice = 0.56, video = 0.14 }",
            "partitions = { video = 0.14 }",
        )
        .replace("offered_users = 50", "offered_users = 20")
        .replace(
            "mix = { voice = 0.8, video = 0.2 }",
            "mix = { video = 1.0 }",
        );
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &text);
    let csv = stdout(&["--config", &cfg, "admit-sim"]);
    let at20: Vec<&str> = csv
        .lines()
        .filter(|l| l.split(',').nth(1) == Some("20"))
        .collect();
    assert_eq!(at20.len(), 2);
    assert!(at20[0].starts_with("fixed,20,95,"), "{}", at20[0]);
    assert!(at20[1].starts_with("utility,20,65,"), "{}", at20[1]);
}

#[test]
fn first_arrival_is_never_blocked() {
    let csv = stdout(&["admit-sim", "--seed", "3"]);
    for l in csv.lines().filter(|l| l.split(',').nth(1) == Some("1")) {
        assert_eq!(l.split(',').nth(2), Some("0"));
    }
}

#[test]
fn bad_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.csv");
    for (broken, needle) in [
        (
            DEFAULT_CONFIG.replace(
                "orthogonality_alpha = 0.9",
                "orthogonality_alpha = 0.9\nalpha = 1",
            ),
            "alpha",
        ),
        (
            DEFAULT_CONFIG.replace("activity_v = 1.0", "activity_v = 0.0"),
            "classes[1]",
        ),
        (
            DEFAULT_CONFIG.replace("scheme = \"uncoded\"", "scheme = \"turbo\""),
            "scenario.scheme",
        ),
    ] {
        let cfg = write_config(dir.path(), &broken);
        let out = wcdma(&[
            "--config",
            &cfg,
            "--out",
            out_path.to_str().unwrap(),
            "admit-sim",
        ]);
        assert!(!out.status.success());
        assert!(out.stdout.is_empty());
        assert!(!out_path.exists());
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn missing_config_file() {
    let out = wcdma(&["--config", "/nonexistent/scenario.toml", "ber-curve"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn usage_errors() {
    assert!(!wcdma(&["ber-curve", "--step", "0"]).status.success());
    assert!(!wcdma(&["ber-curve", "--from", "5", "--to", "1"])
        .status
        .success());
    assert!(!wcdma(&["capacity", "--service", "data"]).status.success());
    assert!(
        !wcdma(&["capacity", "--service", "voice", "--max-users", "0"])
            .status
            .success()
    );
}
