#![allow(clippy::approx_constant)]

use ghz_core::synthesis::profile_for;
use ghz_core::*;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ghz-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn copy_example(name: &str, dir: &Path) -> PathBuf {
    let to = dir.join(name);
    std::fs::copy(example(name), &to).unwrap();
    to
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn table_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split('\t').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn endpoints_default_table() {
    let o = run(&["endpoints"]);
    assert!(o.status.success());
    let rows = table_rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    let want = [1.92423, 0.906373, 4.33454, 2.47062, 1.0, -1.0, 1.0];
    for (g, w) in rows[0].iter().zip(want.iter()) {
        assert!((g - w).abs() < 5e-5, "{:?}", rows[0]);
    }
}

#[test]
fn endpoints_filtered_by_q3() {
    let o = run(&["endpoints", "--q3", "-1"]);
    let rows = table_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| (r[0] - 0.906373).abs() < 5e-6 && r[6] == -1.0));
}

#[test]
fn impossible_pin_exits_2_with_residuals() {
    let o = run(&["endpoints", "--signs", "1,-1,1", "--pin", "1.0,1.0,1.0,1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("residuals"));
}

#[test]
fn endpoints_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.json");
    assert!(run(&["endpoints", "--out", out.to_str().unwrap()])
        .status
        .success());
    assert_eq!(json(&out)["endpoints"].as_array().unwrap().len(), 8);
}

#[test]
fn synthesize_constant_row1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&[
        "synthesize",
        "--duration",
        "1",
        "--samples",
        "11",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,omega1,omega2,omega3\n"));
    let s = PulseSchedule::read_csv(text.as_bytes()).unwrap();
    let rate = 1.92423;
    for sample in &s.samples {
        let r = sample.rabi().as_array();
        for (x, u) in r.iter().zip([0.6366, -0.7378, 1.2223].iter()) {
            assert!((x - u * rate).abs() < 2e-4, "{r:?}");
        }
    }
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("area = ") && err.contains("plateau = "));
    assert!(dir.path().join("s.meta.json").exists());
}

#[test]
fn synthesize_trapezoid_vanishes_at_ends() {
    let o = run(&["synthesize", "--profile", "trapezoid", "--samples", "31"]);
    assert!(o.status.success());
    let s = PulseSchedule::read_csv(o.stdout.as_slice()).unwrap();
    for x in [s.samples.first().unwrap(), s.samples.last().unwrap()] {
        assert!(x.rabi().as_array().iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn invalid_tau_exits_2() {
    let o = run(&["synthesize", "--profile", "trapezoid", "--tau", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthesized_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&[
        "synthesize",
        "--signs",
        "-1,1,-1",
        "--profile",
        "trapezoid",
        "--duration",
        "2.5",
        "--samples",
        "301",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let ep = solve_endpoints(Signs::new(-1, 1, -1).unwrap(), &SolveOptions::default()).unwrap();
    let p = profile_for(&ep, ProfileKind::Trapezoid, 1.0 / 3.0, 2.5).unwrap();
    let mem = rabi_schedule(&build_curve(&ep, &p).unwrap(), 301).unwrap();
    let file = PulseSchedule::read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(file.samples, mem.samples);
}

#[test]
fn shipped_row1_config_converts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_example("row1_constant.toml", dir.path());
    let o = run(&["propagate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("row1_constant.json"));
    for key in [
        "times",
        "fidelity_trace",
        "final_fidelity",
        "ghz_phase",
        "area",
        "endpoint",
        "profile",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["final_fidelity"].as_f64().unwrap() >= 0.999);
}

#[test]
fn shipped_trapezoid_config_converts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_example("row1_trapezoid.toml", dir.path());
    assert!(run(&["synthesize", "--config", cfg.to_str().unwrap()])
        .status
        .success());
    let o = run(&[
        "propagate",
        "--config",
        cfg.to_str().unwrap(),
        "--schedule",
        dir.path().join("row1_trapezoid.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = json(&dir.path().join("row1_trapezoid.json"));
    assert!(v["final_fidelity"].as_f64().unwrap() >= 0.999);
    assert!((v["area"].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!(v["endpoint"].is_object());
}

#[test]
fn reverse_returns_to_w() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rev.json");
    let trace = dir.path().join("rev.csv");
    let o = run(&[
        "propagate",
        "--reverse",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = json(&out);
    assert_eq!(v["target"], "w");
    assert!(v["final_fidelity"].as_f64().unwrap() >= 0.999);
    assert!(std::fs::read_to_string(&trace)
        .unwrap()
        .starts_with("t,fidelity\n"));
}

#[test]
fn zero_schedule_trace_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("zero.csv");
    std::fs::write(&csv, "t,omega1,omega2,omega3\n0,0,0,0\n1,0,0,0\n").unwrap();
    let o = run(&["propagate", "--schedule", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["fidelity_trace"]
        .as_array()
        .unwrap()
        .iter()
        .all(|f| f.as_f64() == Some(0.0)));
    assert!(v["ghz_phase"].is_null());
}

#[test]
fn malformed_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "t,omega1,omega2,omega3\n0,1,2\n").unwrap();
    assert_eq!(
        run(&["propagate", "--schedule", csv.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    std::fs::write(&csv, "time,a,b,c\n0,1,2,3\n1,1,2,3\n").unwrap();
    assert_eq!(
        run(&["propagate", "--schedule", csv.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    for n in ["a", "b"] {
        assert!(run(&[
            "synthesize",
            "--profile",
            "trapezoid",
            "--out",
            &p(&format!("{n}.csv"))
        ])
        .status
        .success());
        assert!(run(&[
            "propagate",
            "--schedule",
            &p(&format!("{n}.csv")),
            "--out",
            &p(&format!("{n}.json"))
        ])
        .status
        .success());
    }
    for ext in ["csv", "meta.json", "json"] {
        let a = std::fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
    assert!(dir.path().join("a.json.log").exists());
}

#[test]
fn physical_units_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("phys.csv");
    let o = run(&[
        "synthesize",
        "--physical-units",
        "--omega-ref-mhz",
        "4",
        "--duration",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = PulseSchedule::read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert!((s.end() - 0.5).abs() < 1e-12);
    assert_eq!(
        json(&dir.path().join("phys.meta.json"))["units"],
        "physical"
    );
    let o = run(&["propagate", "--schedule", csv.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["final_fidelity"].as_f64().unwrap() >= 0.999);
    assert!(run(&["synthesize", "--physical-units"]).status.code() == Some(2));
}

#[test]
fn validate_full_defaults_are_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&[
        "validate-full",
        "--samples",
        "201",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["monotone"], true);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        for key in [
            "leakage_max",
            "effective_vs_full_infidelity",
            "hierarchy_factor",
            "params",
        ] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
    let weak = run(&[
        "validate-full",
        "--samples",
        "201",
        "--factor",
        "3",
        "--force",
    ]);
    let w: Value = serde_json::from_slice(&weak.stdout).unwrap();
    let weak_inf = w["reports"][0]["effective_vs_full_infidelity"]
        .as_f64()
        .unwrap();
    assert!(reports[0]["effective_vs_full_infidelity"].as_f64().unwrap() < weak_inf);
}

#[test]
fn validate_full_override_and_errors() {
    assert_eq!(
        run(&["validate-full", "--factor", "3", "--samples", "21"])
            .status
            .code(),
        Some(2)
    );
    let o = run(&[
        "validate-full",
        "--factor",
        "1",
        "--force",
        "--samples",
        "21",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["hierarchy"]["satisfied"], false);
    assert_eq!(
        run(&["validate-full", "--schedule", "/definitely/missing.csv"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_suite_passes() {
    let o = run(&["check"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("9 of 9 checks passed"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
