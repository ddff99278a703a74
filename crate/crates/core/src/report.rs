//! Assertion records and canonical JSON.

use crate::error::{Error, Result};
use serde::Serialize;

/// A numeric assertion together with the tolerance it was checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="`, `">="` or `"=="` with `bound` as target.
    pub relation: &'static str,
    pub bound: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `value ≤ bound + tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            relation: "<=",
            bound,
            tolerance,
            passed: value <= bound + tolerance,
        }
    }

    /// `value ≥ bound − tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            relation: ">=",
            bound,
            tolerance,
            passed: value >= bound - tolerance,
        }
    }

    /// `|value − target| ≤ tolerance`.
    pub fn close(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            relation: "==",
            bound: target,
            tolerance,
            passed: (value - target).abs() <= tolerance,
        }
    }

    /// A boolean property, recorded as 1/0 against target 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: "==",
            bound: 1.0,
            tolerance: 0.0,
            passed: ok,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// JSON with object keys sorted and floats in shortest round-trip form.
/// Non-finite floats become `null`.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's map type is ordered by key unless `preserve_order` is on
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_sorted_and_floats_round_trip() {
        let mut m = HashMap::new();
        m.insert("zeta", 0.1 + 0.2);
        m.insert("alpha", 1.0 / 3.0);
        let s = canonical_json(&m).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        let back: HashMap<String, f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back["zeta"].to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(canonical_json(&serde_json::json!({})).unwrap(), "{}\n");
    }

    #[test]
    fn checks() {
        assert!(Check::at_most("x", 1.0, 1.0, 0.0).passed);
        assert!(!Check::at_least("x", 0.9, 1.0, 0.05).passed);
        assert!(Check::close("x", 1.01, 1.0, 0.02).passed);
        assert!(!Check::close("x", f64::NAN, 1.0, 0.02).passed);
    }
}
