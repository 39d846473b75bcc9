//! Verification reports: one structured document per run, plus a text view
//! that is a pure function of the document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graded::Truncation;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// What was actually swept, e.g. "monomials of polynomial degree <= 12".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            range: None,
            witness: None,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Self {
            status: Status::Fail,
            witness: Some(witness.into()),
            ..Self::pass(name)
        }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            status: Status::Skipped,
            detail: Some(why.into()),
            ..Self::pass(name)
        }
    }

    /// Pass if `witness` is `None`, fail with it otherwise.
    pub fn from_witness(name: impl Into<String>, witness: Option<String>) -> Self {
        match witness {
            None => Self::pass(name),
            Some(w) => Self::fail(name, w),
        }
    }

    pub fn with_range(mut self, range: impl Into<String>) -> Self {
        self.range = Some(range.into());
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub suite: String,
    pub truncation: Truncation,
    pub checks: Vec<Check>,
    /// Computed values (element text), keyed by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>, truncation: Truncation) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            suite: suite.into(),
            truncation,
            checks: Vec::new(),
            values: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        let prefix = other.suite.clone();
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.values {
            self.values.insert(format!("{prefix}/{k}"), v);
        }
        self.warnings.extend(other.warnings);
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Into<serde_json::Value>) {
        self.values.insert(key.into(), v.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let t = self.truncation;
        let _ = writeln!(
            out,
            "suite {} (format {}), truncation n_poly={} n_hbar={} n_param={}",
            self.suite, self.format_version, t.n_poly, t.n_hbar, t.n_param
        );
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let _ = write!(out, "[{tag}] {}", c.name);
            if let Some(r) = &c.range {
                let _ = write!(out, " over {r}");
            }
            out.push('\n');
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "       witness: {w}");
            }
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "       {d}");
            }
        }
        for (k, v) in &self.values {
            match v {
                serde_json::Value::String(s) => {
                    let _ = writeln!(out, "{k} = {s}");
                }
                other => {
                    let _ = writeln!(out, "{k} = {other}");
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() { "all checks passed" } else { "some checks FAILED" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_status() {
        let mut r = Report::new("demo", Truncation::default());
        r.push(Check::pass("a").with_range("k <= 3"));
        r.value("x", "1*1");
        assert!(r.passed());
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        r.push(Check::fail("b", "t"));
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "b");
        assert!(r.render_text().contains("[FAIL] b"));
    }
}
