use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stmeta::array::wrap_phase;
use stmeta::{bitmask_to_schedule, first_harmonic, ModulationConfig, TickMask};
use stmeta_cli::{ScheduleFile, VerifyReport};
use tempfile::TempDir;

fn stmeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stmeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = stmeta(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let o = out_arg(dir.path());
        ok(&["synthesize", "--theta", "30", "--seed", "7", "--out", &o]);
        ok(&["pattern", "--theta", "30", "--out", &o]);
        ok(&["figures", "--out", &o]);
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 17);
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        assert!(ba == bb, "{na} differs");
    }
}

#[test]
fn reloaded_schedules_reproduce_pattern() {
    for mode in ["static", "phase-only", "amp-phase"] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let (oa, ob) = (out_arg(a.path()), out_arg(b.path()));
        ok(&["synthesize", "--theta", "15", "--mode", mode, "--out", &oa]);
        ok(&["pattern", "--theta", "15", "--mode", mode, "--out", &oa]);
        let sched = a.path().join("schedules.json");
        ok(&["pattern", "--schedules", sched.to_str().unwrap(), "--out", &ob]);
        for f in ["pattern_cut.csv", "metrics.json"] {
            assert_eq!(
                fs::read(a.path().join(f)).unwrap(),
                fs::read(b.path().join(f)).unwrap(),
                "{mode} {f}"
            );
        }
    }
}

#[test]
fn fpga_table_matches_recorded_harmonics() {
    let dir = TempDir::new().unwrap();
    ok(&["synthesize", "--theta", "45", "--out", &out_arg(dir.path())]);
    let file: ScheduleFile =
        serde_json::from_str(&fs::read_to_string(dir.path().join("schedules.json")).unwrap()).unwrap();
    let table = fs::read_to_string(dir.path().join("fpga_table.txt")).unwrap();
    let cfg = ModulationConfig::default();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), file.elements.len());
    for (line, rec) in lines.iter().zip(&file.elements) {
        let parts: Vec<&str> = line.split(' ').collect();
        assert_eq!(parts[0].parse::<usize>().unwrap(), rec.row);
        assert_eq!(parts[1].parse::<usize>().unwrap(), rec.col);
        let hex = parts[2].strip_prefix("0x").unwrap();
        assert_eq!(hex.len(), 16);
        let s = bitmask_to_schedule(&TickMask::from_hex(hex, 64).unwrap(), &cfg).unwrap();
        let a = first_harmonic(&s);
        assert!((a.norm() - rec.alpha1_magnitude).abs() <= 1e-12);
        if rec.alpha1_magnitude > 0.0 {
            assert!(wrap_phase(a.arg() - rec.alpha1_phase_deg.to_radians()).abs() <= 1e-12);
        }
    }
}

#[test]
fn phase_only_tables() {
    let dir = TempDir::new().unwrap();
    let o = out_arg(dir.path());
    ok(&["synthesize", "--mode", "phase-only", "--out", &o]);
    let table = fs::read_to_string(dir.path().join("fpga_table.txt")).unwrap();
    assert_eq!(table.lines().count(), 64);
    assert!(table.lines().all(|l| l.ends_with(" 0x00000000FFFFFFFF")));

    ok(&["synthesize", "--mode", "phase-only", "--theta", "30", "--out", &o]);
    let table = fs::read_to_string(dir.path().join("fpga_table.txt")).unwrap();
    for line in table.lines() {
        let parts: Vec<&str> = line.split(' ').collect();
        let c: u32 = parts[1].parse().unwrap();
        let mask = u64::from_str_radix(&parts[2][2..], 16).unwrap();
        assert_eq!(mask, 0x0000_0000_FFFF_FFFFu64.rotate_left(16 * c % 64), "{line}");
    }
}

#[test]
fn metrics_report_harmonic_frequency() {
    let dir = TempDir::new().unwrap();
    ok(&["pattern", "--out", &out_arg(dir.path())]);
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m["harmonic_hz"].as_f64().unwrap(), 5_501_000_000.0);
    for key in ["sll_db", "hpbw_deg", "pointing_deg", "directivity_dbi"] {
        assert!(m[key].is_f64(), "{key}");
    }
    let csv = fs::read_to_string(dir.path().join("pattern_cut.csv")).unwrap();
    assert!(csv.starts_with("theta_deg,power_db\n"));
    let peak = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(f64::MIN, f64::max);
    assert_eq!(peak, 0.0);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"clock_hz": 63e6}"#).unwrap();
    let out = stmeta(&[
        "synthesize",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clock_hz"));
    assert!(!dir.path().join("schedules.json").exists());

    assert_eq!(stmeta(&["synthesize", "--mode", "dynamic"]).status.code(), Some(2));
    fs::write(&cfg, r#"{"geometry": {"rows": 0}}"#).unwrap();
    assert_eq!(
        stmeta(&["pattern", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        stmeta(&["verify", "--config", "/nonexistent.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = TempDir::new().unwrap();
    let o = out_arg(dir.path());
    ok(&["verify", "--seed", "1", "--out", &o]);
    let rep: VerifyReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify_report.json")).unwrap()).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.schedule_count, 1000);
    assert!(rep.max_oracle_error <= 1e-12);
    assert!(rep.route_max_relative_error <= 1e-9);

    let out = stmeta(&["verify", "--inject-sign-bug", "--out", &o]);
    assert_eq!(out.status.code(), Some(1));
    let rep: VerifyReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify_report.json")).unwrap()).unwrap();
    assert!(!rep.pass);
    assert!(rep.failing_schedule.is_some());
    assert!(dir.path().join("failing_schedule.json").exists());
}

#[test]
fn empty_verify_is_vacuous_pass() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"verify_count": 0, "geometry": {"rows": 2, "cols": 2}}"#).unwrap();
    let out = stmeta(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let rep: VerifyReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify_report.json")).unwrap()).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.schedule_count, 0);
    assert_eq!(rep.warnings.len(), 1);
}

#[test]
fn figures_bundle() {
    let dir = TempDir::new().unwrap();
    ok(&["figures", "--out", &out_arg(dir.path())]);
    let names: Vec<String> = files(dir.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names.iter().filter(|n| n.ends_with(".csv")).count(), 12);
    assert!(names.contains(&"figures_index.json".to_string()));
    assert!(names.contains(&"cut_static_30deg.csv".to_string()));
}
