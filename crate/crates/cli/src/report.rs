use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub subject: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Check {
    pub fn new(name: &str, subject: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            subject: subject.into(),
            passed,
            detail: detail.into(),
            data: Value::Null,
        }
    }

    pub fn with_data(mut self, data: impl Serialize) -> Self {
        self.data = serde_json::to_value(data).unwrap_or(Value::Null);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl EntryReport {
    pub fn new(id: &str, kind: &str, checks: Vec<Check>) -> Self {
        EntryReport {
            id: id.into(),
            kind: kind.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub entries: usize,
    pub checks: usize,
    pub failed_checks: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub summary: Summary,
    pub entries: Vec<EntryReport>,
}

impl Report {
    pub fn new(command: &str, entries: Vec<EntryReport>) -> Self {
        let checks = entries.iter().map(|e| e.checks.len()).sum();
        let failed_checks = entries.iter().flat_map(|e| &e.checks).filter(|c| !c.passed).count();
        Report {
            command: command.into(),
            passed: entries.iter().all(|e| e.passed),
            summary: Summary {
                entries: entries.len(),
                checks,
                failed_checks,
            },
            entries,
        }
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{} {} ({})", verdict(e.passed), e.id, e.kind);
            for c in &e.checks {
                let _ = writeln!(out, "  {} {} {}: {}", verdict(c.passed), c.name, c.subject, c.detail);
            }
        }
        let passed = self.entries.iter().filter(|e| e.passed).count();
        let _ = writeln!(
            out,
            "{}: {passed}/{} entries passed, {} of {} checks failed",
            self.command,
            self.entries.len(),
            self.summary.failed_checks,
            self.summary.checks
        );
        out
    }
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `serde_json::Value` keeps object keys in a `BTreeMap`, so a round trip
/// through it sorts every map.
pub fn to_sorted_json(v: &impl Serialize) -> String {
    let value = serde_json::to_value(v).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}
