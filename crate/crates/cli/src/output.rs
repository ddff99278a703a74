//! Report envelope, tolerance overrides, exit status and artifact writing.

use crate::commands::{Outcome, Table};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// Largest factor by which an override may loosen a default tolerance.
pub const MAX_LOOSEN: f64 = 10.0;
pub const OUT_DIR_VAR: &str = "RADLAB_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn is_check(obj: &Map<String, Value>) -> bool {
    ["name", "value", "relation", "bound", "tolerance", "passed"]
        .iter()
        .all(|k| obj.contains_key(*k))
}

fn reevaluate(obj: &mut Map<String, Value>, tol: f64) {
    let num = |k: &str| obj.get(k).and_then(Value::as_f64).unwrap_or(f64::NAN);
    let (value, bound) = (num("value"), num("bound"));
    let passed = match obj.get("relation").and_then(Value::as_str) {
        Some("<=") => value <= bound + tol,
        Some(">=") => value >= bound - tol,
        _ => (value - bound).abs() <= tol,
    };
    obj.insert("tolerance".into(), json!(tol));
    obj.insert("passed".into(), json!(passed));
}

fn matches(name: &str, key: &str) -> bool {
    name == key || name.ends_with(&format!(" {key}"))
}

fn apply_one(v: &mut Value, key: &str, tol: f64, hits: &mut usize) -> Result<(), OutputError> {
    match v {
        Value::Object(obj) => {
            if is_check(obj) && obj.get("name").and_then(Value::as_str).is_some_and(|n| matches(n, key)) {
                let default = obj.get("tolerance").and_then(Value::as_f64).unwrap_or(0.0);
                if tol > MAX_LOOSEN * default {
                    return Err(OutputError::Usage(format!(
                        "tolerance for {key} may be at most {MAX_LOOSEN}× its default {default}, got {tol}"
                    )));
                }
                reevaluate(obj, tol);
                *hits += 1;
                return Ok(());
            }
            for child in obj.values_mut() {
                apply_one(child, key, tol, hits)?;
            }
        }
        Value::Array(items) => {
            for child in items {
                apply_one(child, key, tol, hits)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Recomputes `passed` of every object that owns `checks` or `criteria`.
fn refresh(v: &mut Value) -> Option<bool> {
    match v {
        Value::Object(obj) => {
            if is_check(obj) {
                return obj.get("passed").and_then(Value::as_bool);
            }
            let mut all = None::<bool>;
            let mut own = None::<bool>;
            for (k, child) in obj.iter_mut() {
                let r = refresh(child);
                if k == "checks" || k == "criteria" {
                    own = Some(own.unwrap_or(true) && r.unwrap_or(true));
                }
                if let Some(r) = r {
                    all = Some(all.unwrap_or(true) && r);
                }
            }
            if let (Some(p), Some(Value::Bool(_))) = (own, obj.get("passed")) {
                obj.insert("passed".into(), json!(p));
                return Some(p);
            }
            all
        }
        Value::Array(items) => items
            .iter_mut()
            .map(refresh)
            .fold(None, |acc, r| match (acc, r) {
                (None, r) => r,
                (a, None) => a,
                (Some(a), Some(b)) => Some(a && b),
            }),
        _ => None,
    }
}

/// Applies `NAME=VALUE` overrides; every name must match at least one check.
pub fn apply_overrides(report: &mut Value, overrides: &[String]) -> Result<(), OutputError> {
    for o in overrides {
        let (key, val) = o
            .split_once('=')
            .ok_or_else(|| OutputError::Usage(format!("override must be NAME=VALUE, got {o:?}")))?;
        let tol: f64 = val
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| OutputError::Usage(format!("bad tolerance {val:?}")))?;
        let mut hits = 0;
        apply_one(report, key, tol, &mut hits)?;
        if hits == 0 {
            return Err(OutputError::Usage(format!("no check named {key:?} in this report")));
        }
    }
    refresh(report);
    Ok(())
}

fn any_failed(v: &Value) -> bool {
    match v {
        Value::Object(obj) => {
            if is_check(obj) {
                return obj.get("passed") != Some(&Value::Bool(true));
            }
            obj.values().any(any_failed)
        }
        Value::Array(items) => items.iter().any(any_failed),
        _ => false,
    }
}

fn any_nonconverged(v: &Value) -> bool {
    match v {
        Value::Object(obj) => {
            obj.get("converged") == Some(&Value::Bool(false)) || obj.values().any(any_nonconverged)
        }
        Value::Array(items) => items.iter().any(any_nonconverged),
        _ => false,
    }
}

/// 0 when every check passed and every fit converged, 2 on a failed check,
/// otherwise 3.
pub fn status(report: &Value) -> i32 {
    if any_failed(report) {
        2
    } else if any_nonconverged(report) {
        3
    } else {
        0
    }
}

pub fn envelope(out: &Outcome) -> Value {
    let mut config = out.config.clone();
    if let Some(obj) = config.as_object_mut() {
        obj.retain(|_, v| !v.is_null());
    }
    json!({
        "command": out.command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": out.common.seed,
        "config": config,
        "passed": !any_failed(&out.report),
        "report": out.report,
    })
}

/// Resolves relative artifact paths under `RADLAB_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), OutputError> {
    let path = resolve(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(&path))?;
    }
    std::fs::write(&path, contents).map_err(io_err(&path))
}

pub fn csv_bytes(table: &Table) -> Result<Vec<u8>, OutputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| OutputError::Usage(format!("csv: {e}"));
    w.write_record(&table.header).map_err(wrap)?;
    for row in &table.rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| OutputError::Usage(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use radlab::report::{canonical_json, Check};

    fn sample() -> Value {
        json!({
            "passed": true,
            "checks": [serde_json::to_value(Check::at_most("err", 2e-10, 0.0, 1e-10)).unwrap()],
        })
    }

    #[test]
    fn overrides_loosen_within_limit() {
        let mut v = sample();
        assert_eq!(status(&v), 2);
        apply_overrides(&mut v, &["err=5e-10".into()]).unwrap();
        assert_eq!(status(&v), 0);
        assert_eq!(v["passed"], json!(true));
        let mut v = sample();
        assert!(apply_overrides(&mut v, &["err=2e-9".into()]).is_err());
        assert!(apply_overrides(&mut v, &["nope=1".into()]).is_err());
        assert!(apply_overrides(&mut v, &["err".into()]).is_err());
    }

    #[test]
    fn tightening_can_fail_a_check() {
        let mut v = json!({"passed": true, "checks": [serde_json::to_value(Check::at_most("d1 x", 0.5, 1.0, 0.0)).unwrap()]});
        apply_overrides(&mut v, &["x=0".into()]).unwrap();
        assert_eq!(status(&v), 0);
        let mut v = json!({"passed": true, "checks": [serde_json::to_value(Check::at_most("x", 1.5, 1.0, 1.0)).unwrap()]});
        apply_overrides(&mut v, &["x=0.1".into()]).unwrap();
        assert_eq!(status(&v), 2);
        assert_eq!(v["passed"], json!(false));
    }

    #[test]
    fn nonconvergence_status() {
        assert_eq!(status(&json!({"fit": {"converged": false}})), 3);
        assert_eq!(status(&json!({})), 0);
        assert_eq!(canonical_json(&json!({})).unwrap(), "{}\n");
    }

    #[test]
    fn csv_has_header() {
        let t = Table {
            header: vec!["m", "lambda"],
            rows: vec![vec!["0".into(), "1".into()], vec!["1".into(), "0.5".into()]],
        };
        let s = String::from_utf8(csv_bytes(&t).unwrap()).unwrap();
        assert_eq!(s, "m,lambda\n0,1\n1,0.5\n");
    }
}
