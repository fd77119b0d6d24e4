//! Experiment reports: named cases of thresholded metrics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value < bound`.
    Below,
    /// `value ≤ bound`.
    AtMost,
    /// `value ≥ bound`.
    AtLeast,
    /// Recorded only; always passes.
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    #[serde(with = "crate::io::json_f64")]
    pub value: f64,
    #[serde(with = "crate::io::json_f64")]
    pub bound: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Metric {
    pub fn new(name: &str, value: f64, comparison: Comparison, bound: f64) -> Self {
        let pass = match comparison {
            Comparison::Below => value < bound,
            Comparison::AtMost => value <= bound,
            Comparison::AtLeast => value >= bound,
            Comparison::Record => true,
        };
        Self { name: name.to_string(), value, bound, comparison, pass }
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Comparison::Below, bound)
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, bound)
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, Comparison::AtLeast, bound)
    }

    pub fn record(name: &str, value: f64) -> Self {
        Self::new(name, value, Comparison::Record, f64::NAN)
    }

    /// Passes iff `flag`; stored as 1 or 0.
    pub fn flag(name: &str, flag: bool) -> Self {
        Self::at_least(name, if flag { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub metrics: Vec<Metric>,
    pub pass: bool,
    /// Command that reruns this case alone.
    pub reproduce: String,
    /// Failures that prevented the metrics from being computed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl Case {
    pub fn new(name: &str, metrics: Vec<Metric>, reproduce: String) -> Self {
        let pass = metrics.iter().all(|m| m.pass);
        Self { name: name.to_string(), metrics, pass, reproduce, errors: Vec::new(), details: serde_json::Value::Null }
    }

    pub fn failed(name: &str, error: String, reproduce: String) -> Self {
        Self { name: name.to_string(), metrics: Vec::new(), pass: false, reproduce, errors: vec![error], details: serde_json::Value::Null }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub inputs_digest: String,
    pub cases: Vec<Case>,
    pub pass: bool,
    pub environment: Environment,
}

impl ExperimentReport {
    pub fn new(name: &str, inputs_digest: String, cases: Vec<Case>) -> Self {
        let pass = cases.iter().all(|c| c.pass);
        Self { name: name.to_string(), inputs_digest, cases, pass, environment: Environment::current() }
    }

    pub fn case(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// One line per case and per failing metric, then the reproduction commands of failures.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} [{}] inputs {}", self.name, verdict(self.pass), &self.inputs_digest);
        for case in &self.cases {
            let _ = writeln!(out, "  {} {}", verdict(case.pass), case.name);
            for m in case.metrics.iter().filter(|m| !m.pass) {
                let _ = writeln!(out, "      {} = {:e} ({:?} {:e})", m.name, m.value, m.comparison, m.bound);
            }
            for e in &case.errors {
                let _ = writeln!(out, "      error: {e}");
            }
        }
        for case in self.failures() {
            let _ = writeln!(out, "  rerun {}: {}", case.name, case.reproduce);
        }
        out
    }
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn inputs_digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("inputs serialize");
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Metric::below("a", 1.0, 2.0).pass);
        assert!(!Metric::below("a", 2.0, 2.0).pass);
        assert!(Metric::at_most("a", 2.0, 2.0).pass);
        assert!(!Metric::at_least("a", f64::NAN, 0.0).pass);
        assert!(Metric::record("a", f64::NAN).pass);
    }

    #[test]
    fn nonfinite_values_serialize() {
        let json = serde_json::to_string(&Metric::below("t", f64::INFINITY, 1.0)).unwrap();
        assert!(json.contains("\"inf\""));
    }
}
