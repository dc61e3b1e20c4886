//! Structured pass/fail reports for theorem checks.
//!
//! Every numeric outcome carries the tolerance it was checked against, and
//! the JSON/CSV encodings are byte-stable for a fixed seed: rows are sorted
//! by check name, floats are printed by `serde_json`'s shortest-roundtrip
//! formatter, and wall-clock timings are zeroed unless explicitly requested.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

impl CheckStatus {
    pub fn passed(self) -> bool {
        self == CheckStatus::Pass
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

/// One row of a verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    /// Check name (also the sort key of the report).
    pub check: String,
    pub status: CheckStatus,
    /// Headline computed number, typically a maximal deviation.
    pub computed: f64,
    /// The value or bound `computed` was compared against.
    pub expected: f64,
    /// Tolerance of the comparison.
    pub tolerance: f64,
    /// Optional witness (violating index, offending configuration, ...).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    /// Wall time; 0 in deterministic emission mode.
    pub runtime_ms: u64,
}

impl CheckOutcome {
    /// Deviation-style outcome: passes iff `computed <= tolerance`.
    pub fn deviation(check: impl Into<String>, computed: f64, tolerance: f64) -> Self {
        CheckOutcome {
            check: check.into(),
            status: CheckStatus::from_bool(computed.is_finite() && computed <= tolerance),
            computed,
            expected: 0.0,
            tolerance,
            witness: None,
            runtime_ms: 0,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn with_expected(mut self, expected: f64) -> Self {
        self.expected = expected;
        self
    }
}

/// A set of check outcomes produced by one suite run or one audit.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        VerificationReport { seed, outcomes: Vec::new() }
    }

    pub fn single(outcome: CheckOutcome) -> Self {
        VerificationReport { seed: 0, outcomes: vec![outcome] }
    }

    pub fn push(&mut self, outcome: CheckOutcome) {
        self.outcomes.push(outcome);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.outcomes.extend(other.outcomes);
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status.passed())
    }

    /// Sort rows by check name so emission order never depends on
    /// completion order.
    pub fn sort(&mut self) {
        self.outcomes.sort_by(|a, b| a.check.cmp(&b.check));
    }

    /// Copy with `runtime_ms` zeroed on every row.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for o in &mut out.outcomes {
            o.runtime_ms = 0;
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        serde_json::to_string_pretty(&sorted).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// CSV with one row per check (plus a header line).
    pub fn to_csv(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = String::from("check,status,computed,expected,tolerance,witness,runtime_ms\n");
        for o in &sorted.outcomes {
            let status = if o.status.passed() { "pass" } else { "fail" };
            let witness = o.witness.as_deref().unwrap_or("");
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                o.check,
                status,
                o.computed,
                o.expected,
                o.tolerance,
                csv_escape(witness),
                o.runtime_ms
            )
            .expect("write to string");
        }
        out
    }

    /// Fixed-width human summary.
    pub fn to_table(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = String::new();
        writeln!(out, "{:<32} {:>6} {:>14} {:>12} {:>10}", "check", "status", "computed", "tolerance", "time(ms)")
            .unwrap();
        for o in &sorted.outcomes {
            let status = if o.status.passed() { "pass" } else { "FAIL" };
            writeln!(
                out,
                "{:<32} {:>6} {:>14.6e} {:>12.1e} {:>10}",
                o.check, status, o.computed, o.tolerance, o.runtime_ms
            )
            .unwrap();
            if let Some(w) = &o.witness {
                if !o.status.passed() {
                    writeln!(out, "    witness: {w}").unwrap();
                }
            }
        }
        out
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrips_losslessly() {
        let mut report = VerificationReport::new(42);
        report.push(
            CheckOutcome::deviation("alpha", 1.25e-13, 1e-12).with_witness("k=3: 2.23 vs 2"),
        );
        report.push(CheckOutcome::deviation("beta", 2.0, 1e-9));
        let json = report.to_json();
        let back = VerificationReport::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.outcomes.len(), 2);
        assert!(!back.all_passed());
    }

    #[test]
    fn csv_row_count_matches_checks() {
        let mut report = VerificationReport::new(0);
        for name in ["c", "a", "b"] {
            report.push(CheckOutcome::deviation(name, 0.0, 1.0));
        }
        let csv = report.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 1 + 3);
        // Sorted by check name.
        assert!(rows[1].starts_with("a,"));
        assert!(rows[3].starts_with("c,"));
    }

    #[test]
    fn timings_can_be_redacted() {
        let mut report = VerificationReport::new(1);
        let mut o = CheckOutcome::deviation("x", 0.0, 1.0);
        o.runtime_ms = 917;
        report.push(o);
        assert!(report.to_json().contains("917"));
        assert!(!report.without_timings().to_json().contains("917"));
    }
}
