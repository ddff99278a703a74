use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn radlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radlab"))
        .args(args)
        .env_remove("RADLAB_OUT_DIR")
        .output()
        .expect("radlab runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("radlab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// λ_{1,m} = (2m−1)!!/(2m)!!, the d = 1 case as a running product.
fn lambda_d1(m: usize) -> f64 {
    (1..=m).map(|k| (2 * k - 1) as f64 / (2 * k) as f64).product()
}

#[test]
fn eigs_matches_closed_form_and_writes_csv() {
    let dir = scratch("eigs");
    let csv = dir.join("eigs.csv");
    let svg = dir.join("eigs.svg");
    let out = radlab(&[
        "eigs", "--dim", "1", "--max-m", "8",
        "--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "eigs");
    assert_eq!(v["seed"], 7);
    let rows = v["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for (m, row) in rows.iter().enumerate() {
        assert!((row["lambda_formula"].as_f64().unwrap() - lambda_d1(m)).abs() < 1e-14);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("m,lambda_formula,"));
    assert_eq!(text.lines().count(), 10);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn json_is_canonical() {
    let out = radlab(&["eigs", "--dim", "2", "--max-m", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn sweep_reports_c2_and_plots_fit() {
    let dir = scratch("sweep");
    let svg = dir.join("sweep.svg");
    let out = radlab(&[
        "sweep", "--dim", "1", "--direction", "psi:2", "--sym", "--eps", "0.02:0.1:5",
        "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let c2 = v["report"]["c2"].as_f64().unwrap();
    assert!((c2 - 0.5).abs() < 0.005, "{c2}");
    let s = std::fs::read_to_string(&svg).unwrap();
    assert!(s.contains("<polyline") && s.contains("<path"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(radlab(&["eigs", "--bogus"]).status.code(), Some(64));
    assert_eq!(radlab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(radlab(&["eigs", "--dim", "0"]).status.code(), Some(64));
    assert_eq!(radlab(&["eigs", "--dim", "1", "--max-m", "60"]).status.code(), Some(64));
    assert_eq!(radlab(&["sweep", "--eps", "0.1,0.2"]).status.code(), Some(64));
    assert_eq!(radlab(&["sweep", "--sym", "--antisym"]).status.code(), Some(64));
    assert_eq!(radlab(&["lorentz", "--family", "cauchy"]).status.code(), Some(64));
    assert_eq!(radlab(&["eigs", "--tol", "max_lambda_error=1"]).status.code(), Some(64));
    assert_eq!(radlab(&["eigs", "--tol", "no_such_check=1e-10"]).status.code(), Some(64));
    assert_eq!(radlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_errors_exit_74() {
    assert_eq!(radlab(&["deficit", "--pair", "/nonexistent/pair.json"]).status.code(), Some(74));
    assert_eq!(
        radlab(&["eigs", "--csv", "/proc/radlab/forbidden.csv"]).status.code(),
        Some(74)
    );
    assert_eq!(radlab(&["eigs", "--config", "/nonexistent.json"]).status.code(), Some(74));
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let out = radlab(&["eigs", "--dim", "1", "--max-m", "4", "--tol", "max_eigen_residual=0"]);
    let v = json(&out);
    let res = v["report"]["checks"][1]["value"].as_f64().unwrap();
    let want = if res > 0.0 { 2 } else { 0 };
    assert_eq!(out.status.code(), Some(want));
    assert_eq!(v["report"]["checks"][1]["tolerance"], 0.0);
}

#[test]
fn deficit_and_fit_read_pair_files() {
    let dir = scratch("pair");
    let pair = dir.join("pair.json");
    std::fs::write(
        &pair,
        r#"{"f": {"repr": "gausspoly", "d": 1, "width": [1.5707963267948966, 0], "coeffs": [[1, 0], [0.05, 0]]},
            "g": {"repr": "gausspoly", "d": 1, "width": [1.5707963267948966, 0], "coeffs": [[1, 0]]}}"#,
    )
    .unwrap();
    let out = radlab(&["deficit", "--pair", pair.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let phi = v["report"]["phi"].as_f64().unwrap();
    assert!(phi < 1.0 && phi > 0.9);
    let out = radlab(&["fit", "--pair", pair.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["converged"], true);

    std::fs::write(&pair, r#"{"f": {"repr": "gausspoly"}}"#).unwrap();
    assert_eq!(radlab(&["fit", "--pair", pair.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn config_file_mirrors_flags() {
    let dir = scratch("config");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"dim": 2, "max_m": 3, "tol": {"max_eigen_residual": 5e-8}}"#).unwrap();
    let out = radlab(&["eigs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["dim"], 2);
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["report"]["checks"][1]["tolerance"], 5e-8);
    // the command line wins over the file
    let out = radlab(&["eigs", "--config", cfg.to_str().unwrap(), "--dim", "3"]);
    assert_eq!(json(&out)["config"]["dim"], 3);
    std::fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(radlab(&["eigs", "--config", cfg.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn out_dir_override() {
    let dir = scratch("outdir");
    let out = Command::new(env!("CARGO_BIN_EXE_radlab"))
        .args(["lorentz", "--family", "indicator", "--csv", "l.csv", "--json", "l.json"])
        .env("RADLAB_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("l.csv").exists());
    assert_eq!(std::fs::read(dir.join("l.json")).unwrap(), out.stdout);
}

#[test]
fn scan_is_deterministic_and_seeded() {
    let a = radlab(&["scan", "--dim", "1", "-n", "8", "--seed", "11"]);
    let b = radlab(&["scan", "--dim", "1", "-n", "8", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["report"]["seed"], 11);
    let c = radlab(&["scan", "--dim", "1", "-n", "8", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn selftest_subset() {
    let out = radlab(&["selftest", "--only", "1,2,6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["criteria"].as_array().unwrap().len(), 3);
    assert_eq!(v["passed"], true);
    assert_eq!(radlab(&["selftest", "--only", "13"]).status.code(), Some(64));
}
