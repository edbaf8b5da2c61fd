use super::sam::SuffixAutomaton;
use crate::report::CheckRecord;

/// Outcome of the first-quarter recurrence scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub max_factor_len: usize,
    /// Distinct factors that start in the first quarter.
    pub checked: u64,
    /// `(start, len)` of factors seen only in the first quarter, shortest first.
    pub violations: Vec<(usize, usize)>,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&self) -> CheckRecord {
        let actual = match self.violations.first() {
            None => format!("{} factors recur", self.checked),
            Some((start, len)) => format!("{} factors never recur; first at start={start}, len={len}", self.violations.len()),
        };
        CheckRecord::test(
            "recurrence",
            format!("len<={}", self.max_factor_len),
            "every factor starting in the first quarter occurs again later",
            actual,
            self.passed(),
        )
    }
}

/// Every distinct factor `u`, `|u| <= max_factor_len`, with a start in
/// `[0, ⌊L/4⌋)` must also start somewhere in `[⌊L/4⌋, L)`.
pub fn recurrence_check(word: &[u32], max_factor_len: usize) -> RecurrenceReport {
    let quarter = word.len() / 4;
    let sam = SuffixAutomaton::build(word);
    let mut checked = 0u64;
    let mut violations = Vec::new();
    for v in sam.states.iter().skip(1) {
        let lo = sam.states[v.link.expect("non-root state has a link")].len + 1;
        let hi = v.len.min(max_factor_len);
        for len in lo..=hi {
            let first_start = v.first_end + 1 - len;
            if first_start >= quarter {
                continue;
            }
            checked += 1;
            if v.last_end + 1 - len < quarter {
                violations.push((first_start, len));
            }
        }
    }
    violations.sort_by_key(|&(start, len)| (len, start));
    RecurrenceReport { max_factor_len, checked, violations }
}

/// Quadratic reference scan of the same property.
pub fn recurrence_violations_naive(word: &[u32], max_factor_len: usize) -> Vec<(usize, usize)> {
    let quarter = word.len() / 4;
    let mut out = Vec::new();
    for len in 1..=max_factor_len.min(word.len()) {
        let mut seen = std::collections::HashSet::new();
        for start in 0..quarter.min(word.len() + 1 - len) {
            let u = &word[start..start + len];
            if !seen.insert(u) {
                continue;
            }
            let again = (quarter..=word.len() - len).any(|j| &word[j..j + len] == u);
            if !again {
                out.push((start, len));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn periodic_passes() {
        let w: Vec<u32> = (0..200).map(|i| i % 2).collect();
        assert!(recurrence_check(&w, 16).passed());
    }

    #[test]
    fn lone_one_fails() {
        let mut w = vec![0u32; 100];
        w[0] = 1;
        let report = recurrence_check(&w, 4);
        assert_eq!(report.violations.first(), Some(&(0, 1)));
    }

    proptest! {
        #[test]
        fn matches_naive(word in prop::collection::vec(0u32..3, 4..150), k in 1usize..12) {
            let mut fast = recurrence_check(&word, k).violations;
            let mut slow = recurrence_violations_naive(&word, k);
            fast.sort();
            slow.sort();
            prop_assert_eq!(fast, slow);
        }
    }
}
