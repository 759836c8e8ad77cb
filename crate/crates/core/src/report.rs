//! Verification reports: named checks with exact values and witnesses.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Unknown,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Unknown => "unknown",
            Verdict::Fail => "fail",
        }
    }
}

/// One named check. Numeric values are exact rational strings (`p/q`);
/// counts appear as `n/1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Self { name: name.into(), verdict, values: BTreeMap::new(), notes: BTreeMap::new(), witness: None }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, Verdict::from_bool(ok))
    }

    pub fn value(mut self, key: &str, v: &Rational) -> Self {
        self.values.insert(key.to_string(), rational::to_string(v));
        self
    }

    pub fn count(mut self, key: &str, n: u64) -> Self {
        self.values.insert(key.to_string(), format!("{n}/1"));
        self
    }

    pub fn note(mut self, key: &str, text: impl Into<String>) -> Self {
        self.notes.insert(key.to_string(), text.into());
        self
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(w).expect("witness serializes"));
        self
    }

    /// A tally check: passes iff `failed == 0`.
    pub fn tally(name: impl Into<String>, total: u64, failed: u64) -> Self {
        Self::pass_if(name, failed == 0).count("total", total).count("failed", failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub version: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(name: impl Into<String>, seed: u64, checks: Vec<Check>) -> Self {
        let verdict = checks.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass);
        Self { name: name.into(), seed, version: env!("CARGO_PKG_VERSION").to_string(), verdict, checks }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{} (seed {}, version {}): {}", self.name, self.seed, self.version, self.verdict.as_str());
        let _ = writeln!(out, "{:<width$}  {:<7}  values", "check", "verdict");
        for c in &self.checks {
            let values: Vec<String> = c.values.iter().chain(&c.notes).map(|(k, v)| format!("{k}={v}")).collect();
            let pad = width - c.name.chars().count();
            let _ = writeln!(out, "{}{}  {:<7}  {}", c.name, " ".repeat(pad), c.verdict.as_str(), values.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn verdict_aggregation() {
        let r = Report::new("x", 1, vec![Check::pass_if("a", true), Check::new("b", Verdict::Unknown)]);
        assert_eq!(r.verdict, Verdict::Unknown);
        let r = Report::new("x", 1, vec![Check::pass_if("a", false), Check::new("b", Verdict::Unknown)]);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(Report::new("x", 1, vec![]).verdict, Verdict::Pass);
    }

    #[test]
    fn values_are_rational_strings() {
        let c = Check::tally("t", 5, 0).value("m", &ratio(3, 4));
        assert_eq!(c.values["total"], "5/1");
        assert_eq!(c.values["m"], "3/4");
        let r = Report::new("x", 7, vec![c]);
        assert!(r.to_json().contains("\"3/4\""));
        assert!(r.to_table().contains("m=3/4"));
    }
}
