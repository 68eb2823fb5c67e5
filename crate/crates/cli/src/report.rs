//! Report records and the pass/fail checks they carry.

use serde::{Serialize, Serializer};

use crate::config::ScenarioConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// JSON has no infinities; exact-zero decay fits report `+∞` exponents.
fn finite_or_text<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// One named comparison `value <relation> threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "finite_or_text")]
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtMost,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: Relation::AtLeast,
            threshold,
            passed: value >= threshold,
        }
    }

    /// Recompute the flag from the numbers; reports must agree with this.
    pub fn recompute(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.threshold,
            Relation::AtLeast => self.value >= self.threshold,
        }
    }
}

/// Run-dependent facts kept apart so the rest of the report is reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub program: &'static str,
    pub version: &'static str,
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ScenarioConfig>,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(
        command: &str,
        scenario: String,
        config: Option<ScenarioConfig>,
        results: serde_json::Value,
        checks: Vec<Check>,
    ) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            scenario,
            config,
            results,
            checks,
            passed,
            metadata: Metadata {
                program: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                elapsed_seconds: 0.0,
                threads: rayon::current_num_threads(),
            },
        }
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Full-precision scientific notation for CSV cells.
pub fn sci(v: f64) -> String {
    format!("{v:e}")
}

/// A header and rows of numbers rendered as CSV.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.into_iter().map(sci).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_follow_relations() {
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_least("b", 0.9, 1.0).passed);
        assert!(!Check::at_most("c", f64::NAN, 1.0).passed);
        assert!(Check::at_least("d", f64::INFINITY, 3.3).passed);
    }

    #[test]
    fn infinite_values_serialize_as_text() {
        let s = serde_json::to_string(&Check::at_least("x", f64::INFINITY, 1.0)).unwrap();
        assert!(s.contains("\"value\":\"inf\""), "{s}");
    }

    #[test]
    fn csv_round_trips() {
        let t = csv_table(&["a", "b"], [vec![0.1, 1.0 / 3.0]]);
        let row: Vec<f64> = t
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.1, 1.0 / 3.0]);
    }
}
