//! Factor complexity of finite words and the checks run against it.

mod checks;
mod gaps;
mod recurrence;
mod sam;

use std::collections::HashMap;

use thiserror::Error;

pub use checks::{balanced_bounds_check, profile_checks, sandwich_check};
pub use gaps::{gap_check, gap_decomposition, GapDecomposition, Segment};
pub use recurrence::{recurrence_check, recurrence_violations_naive, RecurrenceReport};

use sam::SuffixAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("max_len {max_len} exceeds word length {len}")]
    Domain { max_len: usize, len: usize },
    #[error("{0}")]
    Construct(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Suffix automaton, linear in the word length.
    Fast,
    /// Class refinement, one length at a time.
    Naive,
}

/// Measured `p(n)` for `1 <= n <= max_len` of one finite word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityProfile {
    // p[0] = 1 counts the empty word.
    p: Vec<u64>,
    source_length: usize,
    reliable_horizon: usize,
}

impl ComplexityProfile {
    pub fn get(&self, n: usize) -> Option<u64> {
        self.p.get(n).copied()
    }

    pub fn max_len(&self) -> usize {
        self.p.len() - 1
    }

    pub fn values(&self) -> &[u64] {
        &self.p[1..]
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Lengths up to `⌊L/4⌋`, where edge effects of the finite prefix are
    /// small enough for monotonicity and submultiplicativity to be literal.
    pub fn reliable_horizon(&self) -> usize {
        self.reliable_horizon
    }

    /// CSV with header `n,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p\n");
        for (n, p) in self.p.iter().enumerate().skip(1) {
            out.push_str(&format!("{n},{p}\n"));
        }
        out
    }
}

pub fn complexity_profile(word: &[u32], max_len: usize, mode: Mode) -> Result<ComplexityProfile, AnalyzeError> {
    if max_len > word.len() {
        return Err(AnalyzeError::Domain { max_len, len: word.len() });
    }
    let mut p = match mode {
        Mode::Fast => SuffixAutomaton::build(word).counts(max_len),
        Mode::Naive => naive_counts(word, max_len),
    };
    p[0] = 1;
    Ok(ComplexityProfile { p, source_length: word.len(), reliable_horizon: word.len() / 4 })
}

/// Assigns every length-`n` factor an id such that equal factors get equal
/// ids, growing `n` by one symbol per round.
fn naive_counts(word: &[u32], max_len: usize) -> Vec<u64> {
    let len = word.len();
    let mut out = vec![0u64; max_len + 1];
    let mut ids: Vec<u32> = Vec::new();
    for n in 1..=max_len {
        let starts = len - n + 1;
        let mut table: HashMap<(u32, u32), u32> = HashMap::with_capacity(starts);
        let next: Vec<u32> = (0..starts)
            .map(|i| {
                let key = if n == 1 { (u32::MAX, word[i]) } else { (ids[i], word[i + n - 1]) };
                let fresh = table.len() as u32;
                *table.entry(key).or_insert(fresh)
            })
            .collect();
        out[n] = table.len() as u64;
        ids = next;
        if table.len() == starts {
            // All factors distinct from here on.
            for (m, slot) in out.iter_mut().enumerate().skip(n + 1) {
                *slot = (len - m + 1) as u64;
            }
            break;
        }
    }
    out
}
