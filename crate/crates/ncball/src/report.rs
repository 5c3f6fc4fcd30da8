//! Check reports shared by the symbolic, numeric and graph verifiers.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    /// Residual norm, defect value or witness, when the check is numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Extra context: the non-reduced polynomial, a witness, a note.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        CheckEntry { name: name.into(), passed, value: None, detail: None }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// Ordered list of named checks; entries keep insertion order, which every
/// producer makes deterministic for fixed inputs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport { entries: Vec::new() }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn record(&mut self, name: impl Into<String>, passed: bool, value: Option<f64>) {
        let mut e = CheckEntry::new(name, passed);
        e.value = value;
        self.entries.push(e);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.entries.iter().filter(|e| e.passed).count()
    }

    pub fn failed(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }

    /// Largest recorded value, useful as a sweep-level residual summary.
    pub fn max_value(&self) -> Option<f64> {
        self.entries.iter().filter_map(|e| e.value).fold(None, |acc, v| {
            Some(match acc {
                None => v,
                Some(a) => a.max(v),
            })
        })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "[{}] {}", if e.passed { "pass" } else { "FAIL" }, e.name)?;
            if let Some(v) = e.value {
                write!(f, "  value={:.3e}", v)?;
            }
            if let Some(d) = &e.detail {
                write!(f, "  ({})", d)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{}/{} checks passed",
            self.passed_count(),
            self.entries.len()
        )
    }
}
