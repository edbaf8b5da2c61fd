//! Check records shared by every verifier.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

/// One line of a report: what was checked, where, and the outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub location: String,
    pub expected: String,
    pub actual: String,
    pub verdict: Verdict,
    /// Uniform-recurrence window, only on recurrence-window records.
    #[serde(rename = "R_of_L", skip_serializing_if = "Option::is_none")]
    pub r_of_l: Option<String>,
}

impl CheckRecord {
    pub fn new(
        check: impl Into<String>,
        location: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        verdict: Verdict,
    ) -> Self {
        CheckRecord {
            check: check.into(),
            location: location.into(),
            expected: expected.into(),
            actual: actual.into(),
            verdict,
            r_of_l: None,
        }
    }

    /// Pass if `ok`, else fail.
    pub fn test(
        check: impl Into<String>,
        location: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        ok: bool,
    ) -> Self {
        Self::new(check, location, expected, actual, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("check record serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn of(&self, check: &str) -> impl Iterator<Item = &CheckRecord> {
        let check = check.to_string();
        self.records.iter().filter(move |r| r.check == check)
    }

    pub fn to_jsonl(&self) -> String {
        self.records.iter().map(|r| r.to_json_line() + "\n").collect()
    }
}

impl From<Vec<CheckRecord>> for Report {
    fn from(records: Vec<CheckRecord>) -> Self {
        Report { records }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = CheckRecord::test("monotone", "n=3", "p(3) <= p(4)", "5 > 4", false);
        assert_eq!(
            r.to_json_line(),
            r#"{"check":"monotone","location":"n=3","expected":"p(3) <= p(4)","actual":"5 > 4","verdict":"fail"}"#
        );
        let mut w = CheckRecord::new("uniform-recurrence", "L=4", "finite", "12", Verdict::Pass);
        w.r_of_l = Some("12".into());
        assert!(w.to_json_line().contains(r#""R_of_L":"12""#));
    }
}
