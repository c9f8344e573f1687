use std::path::Path;
use std::process::{Command, Output};

use sphere_restriction::verifier::{records_from_csv, records_to_csv, BoundSweepReport, CALIBRATION_ENV};

fn srestrict(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srestrict"))
        .args(args)
        .env_remove(CALIBRATION_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn bessel_values() {
    let o = srestrict(&[
        "bessel",
        "--nu",
        "0.5",
        "--r",
        "1.5707963",
        "--tol",
        "1e-10",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-7);

    let o = srestrict(&["bessel", "--nu", "2", "--r", "1"]);
    assert!(stdout(&o).contains("0.114903"), "{}", stdout(&o));
}

#[test]
fn bessel_domain_error_exits_2() {
    let o = srestrict(&["bessel", "--nu", "-1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu >= 0"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        srestrict(&["--tol", "1e-2", "bessel", "--nu", "1", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(srestrict(&["sweep", "no-such-bound"]).status.code(), Some(2));
    assert_eq!(
        srestrict(&["sweep", "bessel2", "--nu", "1:4:y2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        srestrict(&["--parallelism", "0", "sweep", "ell-d"]).status.code(),
        Some(2)
    );
    assert_eq!(srestrict(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn radial_constants() {
    let o = srestrict(&[
        "rrad",
        "--d",
        "3",
        "--p",
        "1.3333333333",
        "--q",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let x = v["value"]["value"].as_f64().unwrap();
    let pi = std::f64::consts::PI;
    let closed = (32.0 * pi.powi(3)).powf(0.25) / (4.0 * pi).sqrt();
    assert!((x / closed - 1.0).abs() < 1e-6, "{x}");

    let o = srestrict(&["rrad", "--d", "4", "--p", "2", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "infinite (p ≥ 2d/(d+1))");

    let o = srestrict(&["rrad", "--d", "2", "--p", "1", "--q", "inf", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split(',').nth(4), Some("1"));
}

#[test]
fn sweep_writes_schema_conforming_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = srestrict(&[
        "sweep",
        "stempak-upper",
        "--nu",
        "2:256:x2",
        "--p",
        "1,2,4,6",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["bound_id", "grid", "records", "c_min", "c_max", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["bound_id"], "stempak-upper");
    assert_eq!(v["records"].as_array().unwrap().len(), 8 * 4 * 5);
    // parse and re-emit
    assert_eq!(BoundSweepReport::from_json(&text).unwrap().to_json().unwrap(), text);
}

#[test]
fn krasikov_sweep_passes() {
    let o = srestrict(&["sweep", "krasikov", "--nu", "1,2,5,20,100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn ell_d_csv() {
    let o = srestrict(&["sweep", "ell-d", "--d", "10:400:+10", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[6], "400");
    let l: f64 = fields[7].parse().unwrap();
    assert!((l / 0.857763 - 1.0).abs() < 0.05);
    let (_, records) = records_from_csv(&text).unwrap();
    assert_eq!(records.len(), 40);
    assert_eq!(records_to_csv("ell-d".parse().unwrap(), &records), text);
}

#[test]
fn formats_agree_on_numbers_and_exit_codes() {
    let args = ["sweep", "bessel4", "--nu", "2,8,32", "--r-count", "10"];
    let run = |fmt: &str| {
        let mut a = args.to_vec();
        a.extend(["--format", fmt]);
        srestrict(&a)
    };
    let (h, j, c) = (run("human"), run("json"), run("csv"));
    assert_eq!(h.status.code(), j.status.code());
    assert_eq!(h.status.code(), c.status.code());
    let rep = BoundSweepReport::from_json(&stdout(&j)).unwrap();
    assert_eq!(rep.to_csv(), stdout(&c));
}

#[test]
fn verify_all_calibration_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.json");

    let o = srestrict(&["verify-all", "--strict", "--calibration", p(&cal)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!cal.exists());

    let o = srestrict(&["verify-all", "--calibration", p(&cal), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(cal.exists());

    let o = Command::new(env!("CARGO_BIN_EXE_srestrict"))
        .args(["verify-all", "--strict"])
        .env(CALIBRATION_ENV, &cal)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // lower the frozen ceiling of one bound below the measured value
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cal).unwrap()).unwrap();
    let measured = v["bounds"]["bessel4"]["c_max"].as_f64().unwrap();
    v["bounds"]["bessel4"]["c_max"] = serde_json::json!(measured * 0.5);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = srestrict(&["verify-all", "--strict", "--calibration", p(&tampered)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bessel4"), "{}", stderr(&o));
    assert!(stdout(&o).contains("failing: bessel4"));

    std::fs::write(&tampered, "{ not json").unwrap();
    let o = srestrict(&["verify-all", "--strict", "--calibration", p(&tampered)]);
    assert_eq!(o.status.code(), Some(3));
}
