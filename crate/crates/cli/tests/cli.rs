use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn tm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmoments"))
        .args(args)
        .env_remove("TMOMENTS_THETA")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn row<'a>(v: &'a Value, id: &str) -> &'a Value {
    v["rows"].as_array().unwrap().iter().find(|r| r["id"] == id).unwrap()
}

const SMALL_GRID: [&str; 6] = ["--tmin", "400", "--tmax", "2500", "--points", "5"];

#[test]
fn unknown_theorem_is_usage_error() {
    let out = tm(&["verify", "--theorem", "9.9", "--a", "1", "--b", "3", "--c", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown theorem"));
}

#[test]
fn missing_parameter_is_usage_error() {
    assert_eq!(tm(&["constants", "--a", "1"]).status.code(), Some(2));
    assert_eq!(tm(&["verify", "--bogus"]).status.code(), Some(2));
}

#[test]
fn regime_mismatch_is_hypothesis_error() {
    let mut args = vec!["verify", "--theorem", "twisted-divisible", "--a", "1", "--b", "3", "--c", "2"];
    args.extend(SMALL_GRID);
    let out = tm(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis violated"));
}

#[test]
fn verify_reports_both_secondary_exponents() {
    let mut args = vec!["verify", "--theorem", "unit-distinct", "--a", "1", "--b", "3", "--c", "2", "--format", "json"];
    args.extend(SMALL_GRID);
    let out = tm(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let exps: Vec<f64> = v["summary"]["secondary_exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(exps.iter().any(|e| (e - 7.0 / 8.0).abs() < 1e-12));
    assert!(exps.iter().any(|e| (e - 5.0 / 6.0).abs() < 1e-12));
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["config"]["a"], 1);
    for key in [
        "T",
        "numeric_re",
        "numeric_im",
        "predicted_main",
        "predicted_with_secondary",
        "residual_main_only",
        "residual_full",
        "envelope",
        "est_error",
    ] {
        assert!(v["rows"][0].get(key).is_some(), "{key}");
    }
}

#[test]
fn divisible_branch_exponent() {
    let mut args = vec!["verify", "--a", "2", "--b", "4", "--c", "3", "--format", "json"];
    args.extend(SMALL_GRID);
    let v = json(&tm(&args));
    assert_eq!(v["summary"]["theorem"], "twisted-divisible");
    assert_eq!(v["summary"]["secondary_exponents"][0].as_f64().unwrap(), 0.875);
}

#[test]
fn failed_checks_exit_one() {
    let mut args = vec!["verify", "--a", "1", "--b", "3", "--c", "2", "--envelope-max", "1e-9"];
    args.extend(SMALL_GRID);
    assert_eq!(tm(&args).status.code(), Some(1));
}

#[test]
fn constants_table_rows() {
    let v = json(&tm(&["constants", "--a", "1", "--b", "3", "--c", "2", "--format", "json"]));
    let k = row(&v, "K_{1,3,2}")["value"].as_f64().unwrap();
    let zeta_3_2 = 2.612_375_348_685_488;
    assert!((k - std::f64::consts::PI.powi(2) / 6.0 * zeta_3_2).abs() < 1e-12);

    let v = json(&tm(&["constants", "--a", "2", "--b", "4", "--c", "3", "--format", "json"]));
    let s = row(&v, "sigma_{2,4,3}")["value"].as_f64().unwrap();
    let k = row(&v, "K_{2,4,3}")["value"].as_f64().unwrap();
    assert!((s - k).abs() < 1e-10);

    let out = tm(&["constants", "--a", "1", "--b", "2", "--c", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id,params,value,error\n"));
    let bad = text.lines().find(|l| l.starts_with("\"C_{1,2,2}\"")).unwrap();
    assert!(bad.contains("domain violation"));
}

#[test]
fn lattice_small_box() {
    // Q = (2T/2π)^{1/2} = 5
    let t = format!("{}", std::f64::consts::PI * 25.0 * (1.0 + 1e-9));
    let v = json(&tm(&[
        "lattice", "--a", "2", "--b", "4", "--c", "3", "--T", &t, "--method", "both", "--format", "json",
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[1]["n1"].as_u64(), rows[1]["n2"].as_u64()), (Some(4), Some(2)));
}

#[test]
fn scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    for p in [&p1, &p2] {
        let out = tm(&["scan", "--a", "2", "--b", "5", "--c", "3", "--limit", "60", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with("n1,n2,n3,D,ratio\n"));
    let summary: Value = serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.summary.json")).unwrap()).unwrap();
    assert!(summary["summary"]["min_ratio"].as_f64().unwrap() > 0.0);

    // the only candidate (1, 1, 1) has D = 0
    let v = json(&tm(&["scan", "--a", "2", "--b", "4", "--c", "3", "--limit", "1", "--format", "json"]));
    assert!(v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_and_env_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# lattice run\na = 2\nb = 4\nc = 3\ntheta = 0.25\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&tm(&["constants", "--config", c]));
    assert_eq!(v["config"]["theta"], 0.25);
    let v = json(&tm(&["constants", "--config", c, "--theta", "0.4"]));
    assert_eq!(v["config"]["theta"], 0.4);
    let out = Command::new(env!("CARGO_BIN_EXE_tmoments"))
        .args(["constants", "--config", c])
        .env("TMOMENTS_THETA", "0.3")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["theta"], 0.3);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(tm(&["constants", "--config", c]).status.code(), Some(2));
}

#[test]
fn second_moment_within_bound() {
    let out = tm(&["second-moment", "--a", "1", "--tmin", "1000", "--tmax", "20000", "--points", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["summary"]["max_scaled_deviation"].as_f64().unwrap() <= 10.0);
}

#[test]
fn moment_prediction_attached() {
    let v = json(&tm(&["moment", "--a", "1", "--b", "3", "--c", "2", "--T", "1000", "--format", "json"]));
    let r = &v["rows"][0];
    let gap = (r["numeric_re"].as_f64().unwrap() - r["predicted_with_secondary"].as_f64().unwrap()).abs();
    assert!(gap < 1000f64.powf(0.75) * 1000f64.ln().powi(2));
}

fn timed(args: &[&str]) -> f64 {
    let t0 = Instant::now();
    let out = tm(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    t0.elapsed().as_secs_f64()
}

#[test]
fn cache_speeds_up_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("zeta.cache");
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (o1, o2) = (out("first.csv"), out("second.csv"));
    let base = ["verify", "--a", "1", "--b", "3", "--c", "2", "--tmin", "500", "--tmax", "4000", "--points", "5"];
    let with = |o: &str| {
        let mut v: Vec<String> = base.iter().map(|s| s.to_string()).collect();
        v.extend(["--cache".into(), cache.to_str().unwrap().into(), "--out".into(), o.into()]);
        v
    };
    let a1 = with(&o1);
    let a2 = with(&o2);
    let cold = timed(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(Path::new(&cache).exists());
    let warm = timed(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(std::fs::read(&o1).unwrap(), std::fs::read(&o2).unwrap());
    assert!(cold >= 5.0 * warm, "cold {cold:.2}s, warm {warm:.2}s");
}
