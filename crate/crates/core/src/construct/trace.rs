//! Trace records and the checks every trace must pass.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::growth::{GrowthError, GrowthFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Init,
    I,
    IIPrep,
    IISub1,
    IISub2a,
    IISub2b,
    IISub2c,
    IIIStep,
    IIIFinal,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::Init,
        CaseTag::I,
        CaseTag::IIPrep,
        CaseTag::IISub1,
        CaseTag::IISub2a,
        CaseTag::IISub2b,
        CaseTag::IISub2c,
        CaseTag::IIIStep,
        CaseTag::IIIFinal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Init => "init",
            CaseTag::I => "I",
            CaseTag::IIPrep => "II-prep",
            CaseTag::IISub1 => "II-sub1",
            CaseTag::IISub2a => "II-sub2a",
            CaseTag::IISub2b => "II-sub2b",
            CaseTag::IISub2c => "II-sub2c",
            CaseTag::IIIStep => "III-step",
            CaseTag::IIIFinal => "III-final",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseTag::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown case tag {s:?}"))
    }
}

/// One construction step. Every level gets one record; Sub-Case (2)(c)
/// adds a marker record that repeats the current level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub k: u64,
    pub case: CaseTag,
    pub n: u64,
    pub s: BigUint,
    pub g: u64,
    pub balanced: bool,
}

// Field order here is the on-disk order.
#[derive(Serialize, Deserialize)]
struct TraceLine {
    k: String,
    case: String,
    n: String,
    s: String,
    g: String,
    balanced: bool,
}

impl TraceRecord {
    /// One JSON object, integers as decimal strings.
    pub fn to_json_line(&self) -> String {
        let line = TraceLine {
            k: self.k.to_string(),
            case: self.case.to_string(),
            n: self.n.to_string(),
            s: self.s.to_string(),
            g: self.g.to_string(),
            balanced: self.balanced,
        };
        serde_json::to_string(&line).expect("trace line serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, String> {
        let raw: TraceLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let int = |field: &str, v: &str| v.parse::<u64>().map_err(|e| format!("{field}: {e}"));
        Ok(TraceRecord {
            k: int("k", &raw.k)?,
            case: raw.case.parse()?,
            n: int("n", &raw.n)?,
            s: raw.s.parse::<BigUint>().map_err(|e| format!("s: {e}"))?,
            g: int("g", &raw.g)?,
            balanced: raw.balanced,
        })
    }
}

/// Both balance inequalities: `6ns >= f(⌊n/3⌋)` and `2ns <= f(n)`.
pub fn is_balanced(f: &GrowthFunction, n: u64, s: &BigUint) -> Result<bool, GrowthError> {
    let ns = s * n;
    Ok(&ns * 6u32 >= f.eval(n / 3)? && &ns * 2u32 <= f.eval(n)?)
}

pub fn transition_allowed(prev: &TraceRecord, next: CaseTag) -> bool {
    use CaseTag::*;
    match prev.case {
        IISub2c => matches!(next, IIIStep | IIIFinal),
        IIIStep => matches!(next, IIIStep | IIIFinal),
        IIPrep | IISub1 if !prev.balanced => matches!(next, IISub1 | IISub2a | IISub2b | IISub2c),
        _ if prev.balanced => matches!(next, I | IIPrep | IIIStep | IIIFinal),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceIssue {
    /// Position in the trace.
    pub index: usize,
    pub message: String,
}

/// Checks step ratios, balance flags, transitions, gap monotonicity and
/// `s >= 2` over a whole trace.
pub fn check_trace(f: &GrowthFunction, trace: &[TraceRecord]) -> Result<Vec<TraceIssue>, GrowthError> {
    let mut issues = Vec::new();
    let mut issue = |index: usize, message: String| issues.push(TraceIssue { index, message });
    for (i, rec) in trace.iter().enumerate() {
        if rec.s < BigUint::from(2u32) {
            issue(i, format!("s_{} = {} < 2", rec.k, rec.s));
        }
        if rec.balanced && !is_balanced(f, rec.n, &rec.s)? {
            issue(i, format!("k = {} flagged balanced but (n, s) = ({}, {}) is not", rec.k, rec.n, rec.s));
        }
        if i == 0 {
            if rec.case != CaseTag::Init {
                issue(i, format!("trace starts with {} instead of init", rec.case));
            }
            continue;
        }
        let prev = &trace[i - 1];
        if rec.case == CaseTag::Init {
            issue(i, "init record after the start".into());
        } else if !transition_allowed(prev, rec.case) {
            issue(i, format!("transition {} -> {} is not allowed", prev.case, rec.case));
        }
        if rec.case == CaseTag::IISub2c {
            if (rec.k, rec.n, &rec.s) != (prev.k, prev.n, &prev.s) {
                issue(i, "Sub-Case (2)(c) marker must repeat the current level".into());
            }
        } else {
            if rec.k != prev.k + 1 {
                issue(i, format!("level index jumps from {} to {}", prev.k, rec.k));
            }
            if !(2 * prev.n < rec.n && rec.n <= 8 * prev.n) {
                issue(i, format!("step {} -> {} violates 2n < n' <= 8n", prev.n, rec.n));
            }
        }
        if prev.case != CaseTag::Init && rec.g < prev.g {
            issue(i, format!("gap parameter decreases from {} to {}", prev.g, rec.g));
        }
    }
    Ok(issues)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: u64, case: CaseTag, n: u64, s: u64, g: u64, balanced: bool) -> TraceRecord {
        TraceRecord { k, case, n, s: BigUint::from(s), g, balanced }
    }

    #[test]
    fn json_line_field_order() {
        let r = rec(2, CaseTag::IIPrep, 72, 24, 54, false);
        assert_eq!(r.to_json_line(), r#"{"k":"2","case":"II-prep","n":"72","s":"24","g":"54","balanced":false}"#);
        assert_eq!(TraceRecord::from_json_line(&r.to_json_line()).unwrap(), r);
    }

    #[test]
    fn huge_s_round_trips() {
        let mut r = rec(9, CaseTag::IISub1, 1000, 0, 54, false);
        r.s = BigUint::from(3u32).pow(200);
        assert_eq!(TraceRecord::from_json_line(&r.to_json_line()).unwrap(), r);
    }

    #[test]
    fn tags_round_trip() {
        for tag in CaseTag::ALL {
            assert_eq!(tag.as_str().parse::<CaseTag>().unwrap(), tag);
        }
        assert!("II".parse::<CaseTag>().is_err());
    }

    #[test]
    fn flags_bad_traces() {
        let f = GrowthFunction::parse("max(8*n, n^2)").unwrap().normalize();
        let good = vec![rec(1, CaseTag::Init, 1, 4, 0, true), rec(2, CaseTag::I, 3, 4, 1, true)];
        assert!(check_trace(&f, &good).unwrap().is_empty());

        let ratio = vec![rec(1, CaseTag::Init, 1, 4, 0, true), rec(2, CaseTag::I, 9, 4, 1, true)];
        assert_eq!(check_trace(&f, &ratio).unwrap().len(), 1);

        let transition = vec![rec(1, CaseTag::Init, 1, 4, 0, true), rec(2, CaseTag::IISub1, 3, 4, 1, false)];
        assert_eq!(check_trace(&f, &transition).unwrap().len(), 1);
    }
}
