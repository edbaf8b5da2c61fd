use crate::construct::LevelSet;
use crate::report::{CheckRecord, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// Symbols between two long 0-runs; may contain shorter 0-runs inside.
    Block { start: usize, len: usize, complete: bool },
    /// A maximal 0-run of length at least the threshold.
    Gap { start: usize, len: usize, complete: bool },
}

impl Segment {
    pub fn start(&self) -> usize {
        match *self {
            Segment::Block { start, .. } | Segment::Gap { start, .. } => start,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Segment::Block { len, .. } | Segment::Gap { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        match *self {
            Segment::Block { complete, .. } | Segment::Gap { complete, .. } => complete,
        }
    }
}

/// `ρ1 0^m1 ρ2 0^m2 …` at one threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapDecomposition {
    pub threshold: usize,
    pub segments: Vec<Segment>,
}

impl GapDecomposition {
    pub fn blocks(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s, Segment::Block { .. }))
    }

    pub fn gaps(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s, Segment::Gap { .. }))
    }

    /// Concatenates the blocks (taken from `word`) with the 0-runs.
    pub fn reconstruct(&self, word: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(word.len());
        for seg in &self.segments {
            match *seg {
                Segment::Block { start, len, .. } => out.extend_from_slice(&word[start..start + len]),
                Segment::Gap { len, .. } => out.extend(std::iter::repeat_n(0, len)),
            }
        }
        out
    }
}

/// Splits `word` at maximal 0-runs of length `>= threshold`. The word is
/// read as the start of a one-sided infinite word: a segment touching the
/// left end is complete, one touching the right end is not. A leading 0-run
/// is never complete.
pub fn gap_decomposition(word: &[u32], threshold: usize) -> GapDecomposition {
    let threshold = threshold.max(1);
    let mut segments = Vec::new();
    let mut block_start = 0usize;
    let mut i = 0usize;
    while i < word.len() {
        if word[i] != 0 {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < word.len() && word[i] == 0 {
            i += 1;
        }
        let run = i - run_start;
        if run >= threshold {
            if run_start > block_start {
                segments.push(Segment::Block { start: block_start, len: run_start - block_start, complete: true });
            }
            let complete = run_start > 0 && i < word.len();
            segments.push(Segment::Gap { start: run_start, len: run, complete });
            block_start = i;
        }
    }
    if block_start < word.len() {
        segments.push(Segment::Block { start: block_start, len: word.len() - block_start, complete: false });
    }
    GapDecomposition { threshold, segments }
}

/// Reconstruction, block membership in `level` and gap lengths `>= n_k`.
pub fn gap_check(word: &[u32], level: &LevelSet) -> Report {
    let n = level.len() as usize;
    let decomposition = gap_decomposition(word, n);
    let loc = format!("k={},n={n}", level.k());
    let mut report = Report::default();
    report.push(CheckRecord::test(
        "gap-reconstruct",
        &loc,
        "segments concatenate to the word",
        format!("{} segments", decomposition.segments.len()),
        decomposition.reconstruct(word) == word,
    ));
    let complete: Vec<&Segment> = decomposition.blocks().filter(|b| b.is_complete()).collect();
    let foreign = complete.iter().find(|b| !level.contains(&word[b.start()..b.start() + b.len()]));
    report.push(CheckRecord::test(
        "gap-blocks",
        &loc,
        "every complete block is a member of the level",
        match foreign {
            None => format!("{} complete blocks", complete.len()),
            Some(b) => format!("block at {} (len {}) is not a member", b.start(), b.len()),
        },
        foreign.is_none(),
    ));
    let short = decomposition.gaps().filter(|g| g.is_complete()).find(|g| g.len() < n);
    report.push(CheckRecord::test(
        "gap-lengths",
        &loc,
        format!("every complete gap >= {n}"),
        match short {
            None => format!("{} complete gaps", decomposition.gaps().filter(|g| g.is_complete()).count()),
            Some(g) => format!("gap at {} has length {}", g.start(), g.len()),
        },
        short.is_none(),
    ));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_block() {
        let d = gap_decomposition(&[1, 0, 2], 3);
        assert_eq!(d.segments, vec![Segment::Block { start: 0, len: 3, complete: false }]);
    }

    #[test]
    fn threshold_one() {
        let d = gap_decomposition(&[1, 0, 2], 1);
        assert_eq!(
            d.segments,
            vec![
                Segment::Block { start: 0, len: 1, complete: true },
                Segment::Gap { start: 1, len: 1, complete: true },
                Segment::Block { start: 2, len: 1, complete: false },
            ]
        );
    }

    proptest! {
        #[test]
        fn reconstructs(word in prop::collection::vec(0u32..3, 0..200), t in 1usize..6) {
            let d = gap_decomposition(&word, t);
            prop_assert_eq!(d.reconstruct(&word), word.clone());
            for g in d.gaps() {
                prop_assert!(g.len() >= t);
            }
            for w in d.segments.windows(2) {
                let alternates = matches!((w[0], w[1]), (Segment::Block { .. }, Segment::Gap { .. }) | (Segment::Gap { .. }, Segment::Block { .. }));
                prop_assert!(alternates);
            }
        }
    }
}
