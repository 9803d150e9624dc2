use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One verified inequality or identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub meta: BTreeMap<String, Value>,
}

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

impl CheckResult {
    /// Constant-1 inequality `lhs <= rhs`, passing when `ratio <= 1 + tol`.
    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let r = ratio(lhs, rhs);
        Self {
            name: name.into(),
            lhs,
            rhs,
            ratio: r,
            pass: r <= 1.0 + tol,
            meta: BTreeMap::new(),
        }
        .with_meta("tolerance", tol)
    }

    /// Inequality with an unknown constant; the ratio is the empirical
    /// constant and the check passes when it is finite.
    pub fn empirical(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let r = ratio(lhs, rhs);
        Self {
            name: name.into(),
            lhs,
            rhs,
            ratio: r,
            pass: r.is_finite(),
            meta: BTreeMap::new(),
        }
        .with_meta("empirical_constant", r)
    }

    /// Identity `lhs = rhs` up to a relative (or, for `rhs = 0`, absolute)
    /// tolerance.
    pub fn identity(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Self {
        let residual = if rhs == 0.0 {
            (lhs - rhs).abs()
        } else {
            (lhs - rhs).abs() / rhs.abs()
        };
        let tol = if rhs == 0.0 { abs_tol } else { rel_tol };
        Self {
            name: name.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            pass: residual <= tol,
            meta: BTreeMap::new(),
        }
        .with_meta("residual", residual)
        .with_meta("tolerance", tol)
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.meta.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    /// Tightens the verdict with `empirical_constant <= limit`.
    pub fn require_at_most(mut self, limit: f64) -> Self {
        let c = self.empirical_constant().unwrap_or(self.ratio);
        self.pass &= c <= limit;
        self.with_meta("limit", limit)
    }

    pub fn empirical_constant(&self) -> Option<f64> {
        self.meta.get("empirical_constant").and_then(Value::as_f64)
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta.get(key).and_then(Value::as_f64)
    }
}

/// Harness output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.into(),
            checks,
            pass,
        }
    }

    /// Check names with the trailing `[...]` qualifiers removed.
    pub fn families(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                c.name
                    .split('[')
                    .next()
                    .unwrap_or(&c.name)
                    .trim()
                    .to_string()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }

    #[test]
    fn verdicts() {
        assert!(CheckResult::bound("a", 1.0, 1.0, 0.0).pass);
        assert!(!CheckResult::bound("a", 1.1, 1.0, 1e-3).pass);
        assert!(CheckResult::bound("a", 0.0, 0.0, 0.0).pass);
        let e = CheckResult::empirical("c", 3.0, 2.0);
        assert!(e.pass);
        assert_eq!(e.empirical_constant(), Some(1.5));
        assert!(!e.clone().require_at_most(1.4).pass);
        assert!(e.require_at_most(1.6).pass);
        assert!(!CheckResult::empirical("c", 1.0, 0.0).pass);
        assert!(CheckResult::identity("i", 1.0 + 1e-9, 1.0, 1e-8, 0.0).pass);
        assert!(CheckResult::identity("i", 1e-15, 0.0, 1e-8, 1e-14).pass);
    }

    #[test]
    fn report_json_shape() {
        let r = Report::new(
            "lemmas",
            vec![CheckResult::bound("x [seed 1]", 1.0, 2.0, 0.0)],
        );
        let v: Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["suite"], "lemmas");
        assert_eq!(v["pass"], true);
        for key in ["name", "lhs", "rhs", "ratio", "pass", "meta"] {
            assert!(v["checks"][0].get(key).is_some(), "{key}");
        }
        assert_eq!(r.families(), vec!["x".to_string()]);
    }
}
