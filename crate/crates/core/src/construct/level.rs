//! Symbolic level sets `X_k`.
//!
//! A level never stores its members. It stores the rule that builds them
//! from a parent level, and materializes individual members (or prefixes of
//! them) on demand. Member order is fixed:
//!
//! 1. the pairing sequence `α1⋆α2, α3⋆α4, …` followed by `αs⋆α1`
//!    (for odd `s` the last pair is dropped in favour of `αs⋆α1`);
//! 2. all remaining members, lexicographic by their construction parameters.
//!
//! Case III levels are the exception: their blocks `β1, β2, …` already come
//! in pairing order.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::ConstructError;
use crate::Word;

#[derive(Debug)]
pub struct LevelSet {
    k: u64,
    n: u64,
    size: BigUint,
    rule: LevelRule,
}

#[derive(Debug)]
pub enum LevelRule {
    /// `X_1`: the single-symbol words `1, 2, …, s`.
    Base,
    /// An explicit starting level, used to resume the construction from an
    /// arbitrary balanced configuration.
    Seed { words: Vec<Word>, index: HashMap<Word, u64> },
    /// `α 0^n β` with `β ∈ Y(α)`.
    CaseI { parent: Arc<LevelSet>, spread: Spread },
    /// `α 0^n 0^j β 0^(3n-j) 0^n γ` with `γ` the cyclic successor of `α`.
    CaseIIPrep { parent: Arc<LevelSet>, spread: Spread },
    /// `α 0^gap β` over all ordered pairs.
    Square { parent: Arc<LevelSet>, gap: u64, spread: Spread },
    /// Blocks of `2^step` consecutive (cyclic) base words joined by `0^n_base`.
    CaseIII { base: Arc<LevelSet>, step: u32 },
}

/// How the children of a pair-built level are spread over parents: parent
/// `a` owns `lo + [a < extra]` children, enumerated by an offset `t`.
#[derive(Debug, Clone)]
pub struct Spread {
    parents: BigUint,
    lo: BigUint,
    extra: BigUint,
}

impl Spread {
    /// Spread `total` children as evenly as possible over `parents`.
    pub fn even(parents: &BigUint, total: &BigUint) -> Spread {
        let (lo, extra) = total.div_rem(parents);
        Spread { parents: parents.clone(), lo, extra }
    }

    fn total(&self) -> BigUint {
        &self.parents * &self.lo + &self.extra
    }

    /// `⌈total / parents⌉`.
    pub fn max_count(&self) -> BigUint {
        if self.extra.is_zero() {
            self.lo.clone()
        } else {
            &self.lo + 1u32
        }
    }

    pub fn min_count(&self) -> &BigUint {
        &self.lo
    }

    fn count(&self, a: &BigUint) -> BigUint {
        if a < &self.extra {
            &self.lo + 1u32
        } else {
            self.lo.clone()
        }
    }

    fn half(&self) -> BigUint {
        &self.parents >> 1
    }

    fn pairing_len(&self) -> BigUint {
        self.half() + 1u32
    }

    fn in_pairing(&self, a: &BigUint) -> bool {
        (a.is_even() && a < &(self.half() << 1)) || a + 1u32 == self.parents
    }

    /// Members outside the pairing sequence owned by parents `< a`.
    fn rest_before(&self, a: &BigUint) -> BigUint {
        let owned = a * &self.lo + a.min(&self.extra).clone();
        let evens = ((a + 1u32) >> 1u32).min(self.half());
        let last = if a >= &self.parents { 1u32 } else { 0 };
        owned - evens - last
    }

    /// Member at `idx` as `(parent, offset)`.
    fn locate(&self, idx: u64) -> Option<(BigUint, BigUint)> {
        let idx_big = BigUint::from(idx);
        if idx_big >= self.total() {
            return None;
        }
        let pairing = self.pairing_len();
        if idx_big < pairing {
            let a = if idx_big < self.half() { idx_big << 1 } else { &self.parents - 1u32 };
            return Some((a, BigUint::zero()));
        }
        let e = idx_big - pairing;
        // Largest a with rest_before(a) <= e.
        let (mut lo, mut hi) = (BigUint::zero(), self.parents.clone());
        while &lo + 1u32 < hi {
            let mid: BigUint = (&lo + &hi) >> 1;
            if self.rest_before(&mid) <= e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = lo;
        let mut t = e - self.rest_before(&a);
        if self.in_pairing(&a) {
            t += 1u32;
        }
        debug_assert!(t < self.count(&a));
        Some((a, t))
    }

    fn position(&self, a: &BigUint, t: &BigUint) -> Option<BigUint> {
        if a >= &self.parents || t >= &self.count(a) {
            return None;
        }
        let in_pairing = self.in_pairing(a);
        if t.is_zero() && in_pairing {
            return Some(if a.is_even() && a < &(self.half() << 1) { a >> 1 } else { self.half() });
        }
        let skip = if in_pairing { 1u32 } else { 0 };
        Some(self.pairing_len() + self.rest_before(a) + t - skip)
    }
}

fn to_index(v: &BigUint) -> Result<u64, ConstructError> {
    v.to_u64().ok_or_else(|| ConstructError::Resource(format!("member index {v} exceeds 64 bits")))
}

/// `(a + 1 + t) mod s`
fn cyclic(a: &BigUint, t: &BigUint, s: &BigUint) -> BigUint {
    (a + t + 1u32) % s
}

/// `(b - a - 1) mod s`
fn cyclic_offset(a: u64, b: u64, s: &BigUint) -> BigUint {
    let (a, b) = (BigUint::from(a), BigUint::from(b));
    (b + s + s - a - 1u32) % s
}

enum Part<'a> {
    Zeros(u64),
    Word(&'a LevelSet, u64),
}

/// Writes at most `remaining` symbols.
struct Sink<'o> {
    out: &'o mut Word,
    remaining: u64,
}

impl Sink<'_> {
    fn push(&mut self, part: Part<'_>) -> Result<bool, ConstructError> {
        if self.remaining == 0 {
            return Ok(false);
        }
        match part {
            Part::Zeros(z) => {
                let take = z.min(self.remaining);
                self.out.extend(std::iter::repeat_n(0, take as usize));
                self.remaining -= take;
            }
            Part::Word(level, idx) => {
                let take = level.n.min(self.remaining);
                level.write_prefix(idx, take, self.out)?;
                self.remaining -= take;
            }
        }
        Ok(self.remaining > 0)
    }
}

impl LevelSet {
    pub fn base(alphabet: u32) -> LevelSet {
        LevelSet { k: 1, n: 1, size: BigUint::from(alphabet), rule: LevelRule::Base }
    }

    pub fn seed(k: u64, words: Vec<Word>) -> Result<LevelSet, ConstructError> {
        let n = words.first().map(|w| w.len() as u64).unwrap_or(0);
        if n == 0 {
            return Err(ConstructError::Consistency("seed level must contain non-empty words".into()));
        }
        let mut index = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            if w.len() as u64 != n || w[0] == 0 || w[w.len() - 1] == 0 {
                return Err(ConstructError::Consistency(format!("seed word {i} has wrong shape")));
            }
            if index.insert(w.clone(), i as u64).is_some() {
                return Err(ConstructError::Consistency(format!("seed word {i} is a duplicate")));
            }
        }
        Ok(LevelSet { k, n, size: BigUint::from(words.len()), rule: LevelRule::Seed { words, index } })
    }

    pub fn case_i(parent: Arc<LevelSet>, size: BigUint) -> Result<LevelSet, ConstructError> {
        let spread = Spread::even(&parent.size, &size);
        if spread.min_count().is_zero() || spread.max_count() > parent.size {
            return Err(ConstructError::Consistency(format!("Case I cannot spread {size} words over {} parents", parent.size)));
        }
        Ok(LevelSet { k: parent.k + 1, n: 3 * parent.n, size, rule: LevelRule::CaseI { parent, spread } })
    }

    pub fn case_ii_prep(parent: Arc<LevelSet>, size: BigUint) -> Result<LevelSet, ConstructError> {
        let spread = Spread::even(&parent.size, &size);
        let capacity = BigUint::from(3 * parent.n + 1) * &parent.size;
        if spread.min_count().is_zero() || spread.max_count() > capacity {
            return Err(ConstructError::Consistency(format!(
                "Case II preparation cannot place {size} words over {} parents",
                parent.size
            )));
        }
        Ok(LevelSet { k: parent.k + 1, n: 8 * parent.n, size, rule: LevelRule::CaseIIPrep { parent, spread } })
    }

    pub fn square(parent: Arc<LevelSet>, gap: u64) -> LevelSet {
        let size = &parent.size * &parent.size;
        let spread = Spread::even(&parent.size, &size);
        LevelSet { k: parent.k + 1, n: 2 * parent.n + gap, size, rule: LevelRule::Square { parent, gap, spread } }
    }

    /// Level `k + step` of a Case III run from `base = X_k`.
    pub fn case_iii(base: Arc<LevelSet>, step: u32) -> Result<LevelSet, ConstructError> {
        let blocks = 1u64.checked_shl(step).filter(|b| *b < (1 << 62));
        let n = blocks
            .and_then(|b| (2 * b - 1).checked_mul(base.n))
            .ok_or_else(|| ConstructError::Resource(format!("Case III step {step} word length overflows")))?;
        let size = Integer::div_ceil(&base.size, &(BigUint::one() << step));
        if size < BigUint::from(2u32) {
            return Err(ConstructError::Consistency(format!("Case III step {step} leaves {size} words (need at least 2)")));
        }
        Ok(LevelSet { k: base.k + step as u64, n, size, rule: LevelRule::CaseIII { base, step } })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Word length `n_k`.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.size.is_zero()
    }

    /// Cardinality `s_k`.
    pub fn size(&self) -> &BigUint {
        &self.size
    }

    pub fn rule(&self) -> &LevelRule {
        &self.rule
    }

    pub fn word(&self, idx: u64) -> Result<Word, ConstructError> {
        let mut out = Vec::with_capacity(self.n as usize);
        self.write_prefix(idx, self.n, &mut out)?;
        Ok(out)
    }

    pub fn first_word(&self) -> Result<Word, ConstructError> {
        self.word(0)
    }

    /// Appends the first `len` symbols of member `idx` to `out`.
    pub fn write_prefix(&self, idx: u64, len: u64, out: &mut Word) -> Result<(), ConstructError> {
        let len = len.min(self.n);
        if BigUint::from(idx) >= self.size {
            return Err(ConstructError::IndexOutOfRange { k: self.k, index: idx });
        }
        let mut sink = Sink { out, remaining: len };
        match &self.rule {
            LevelRule::Base => {
                if len > 0 {
                    sink.out.push(idx as u32 + 1);
                }
            }
            LevelRule::Seed { words, .. } => sink.out.extend_from_slice(&words[idx as usize][..len as usize]),
            LevelRule::CaseI { parent, spread } => {
                let (a, t) = spread.locate(idx).expect("index checked");
                let b = to_index(&cyclic(&a, &t, &parent.size))?;
                let _ = sink.push(Part::Word(parent, to_index(&a)?))?
                    && sink.push(Part::Zeros(parent.n))?
                    && sink.push(Part::Word(parent, b))?;
            }
            LevelRule::Square { parent, gap, spread } => {
                let (a, t) = spread.locate(idx).expect("index checked");
                let b = to_index(&cyclic(&a, &t, &parent.size))?;
                let _ = sink.push(Part::Word(parent, to_index(&a)?))?
                    && sink.push(Part::Zeros(*gap))?
                    && sink.push(Part::Word(parent, b))?;
            }
            LevelRule::CaseIIPrep { parent, spread } => {
                let (a, rank) = spread.locate(idx).expect("index checked");
                let (j, b) = prep_components(&a, &rank, &parent.size)?;
                let succ = to_index(&cyclic(&a, &BigUint::zero(), &parent.size))?;
                let n = parent.n;
                let _ = sink.push(Part::Word(parent, to_index(&a)?))?
                    && sink.push(Part::Zeros(n + j))?
                    && sink.push(Part::Word(parent, b))?
                    && sink.push(Part::Zeros(4 * n - j))?
                    && sink.push(Part::Word(parent, succ))?;
            }
            LevelRule::CaseIII { base, step } => {
                let blocks = 1u64 << step;
                let first = BigUint::from(idx) << *step;
                for u in 0..blocks {
                    if u > 0 && !sink.push(Part::Zeros(base.n))? {
                        break;
                    }
                    let member = to_index(&((&first + u) % &base.size))?;
                    if !sink.push(Part::Word(base, member))? {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    /// Position of `word` in this level, if it is a member.
    pub fn index_of(&self, word: &[u32]) -> Option<u64> {
        if word.len() as u64 != self.n {
            return None;
        }
        let n = |level: &LevelSet| level.n as usize;
        let zeros = |w: &[u32]| w.iter().all(|&c| c == 0);
        match &self.rule {
            LevelRule::Base => {
                let sym = word[0] as u64;
                (sym >= 1 && BigUint::from(sym) <= self.size).then(|| sym - 1)
            }
            LevelRule::Seed { index, .. } => index.get(word).copied(),
            LevelRule::CaseI { parent, spread } => {
                let m = n(parent);
                if !zeros(&word[m..2 * m]) {
                    return None;
                }
                let a = parent.index_of(&word[..m])?;
                let b = parent.index_of(&word[2 * m..])?;
                let t = cyclic_offset(a, b, &parent.size);
                spread.position(&BigUint::from(a), &t)?.to_u64()
            }
            LevelRule::Square { parent, gap, spread } => {
                let (m, g) = (n(parent), *gap as usize);
                if !zeros(&word[m..m + g]) {
                    return None;
                }
                let a = parent.index_of(&word[..m])?;
                let b = parent.index_of(&word[m + g..])?;
                let t = cyclic_offset(a, b, &parent.size);
                spread.position(&BigUint::from(a), &t)?.to_u64()
            }
            LevelRule::CaseIIPrep { parent, spread } => {
                let m = n(parent);
                let middle = &word[m..7 * m];
                let j = middle.iter().take_while(|&&c| c == 0).count();
                if j < m || j > 4 * m || j + m > middle.len() {
                    return None;
                }
                let beta = &middle[j..j + m];
                if !zeros(&middle[j + m..]) {
                    return None;
                }
                let a = parent.index_of(&word[..m])?;
                let b = parent.index_of(beta)?;
                let gamma = parent.index_of(&word[7 * m..])?;
                let a_big = BigUint::from(a);
                if BigUint::from(gamma) != cyclic(&a_big, &BigUint::zero(), &parent.size) {
                    return None;
                }
                let rank = prep_rank(&a_big, (j - m) as u64, b, &parent.size);
                spread.position(&a_big, &rank)?.to_u64()
            }
            LevelRule::CaseIII { base, step } => {
                let m = n(base);
                let blocks = 1usize << step;
                let first = base.index_of(&word[..m])?;
                if first % (1u64 << step) != 0 {
                    return None;
                }
                let t = first >> step;
                if BigUint::from(t) >= self.size {
                    return None;
                }
                for u in 1..blocks {
                    let start = u * 2 * m;
                    if !zeros(&word[start - m..start]) {
                        return None;
                    }
                    let expected = (BigUint::from(first) + u) % &base.size;
                    if BigUint::from(base.index_of(&word[start..start + m])?) != expected {
                        return None;
                    }
                }
                Some(t)
            }
        }
    }

    pub fn contains(&self, word: &[u32]) -> bool {
        self.index_of(word).is_some()
    }

    /// Every member in order. Only sensible for small levels.
    pub fn members(&self) -> Result<Vec<Word>, ConstructError> {
        let count = self
            .size
            .to_u64()
            .filter(|s| s.saturating_mul(self.n) <= 1 << 26)
            .ok_or_else(|| ConstructError::Resource(format!("level {} is too large to enumerate", self.k)))?;
        (0..count).map(|i| self.word(i)).collect()
    }
}

/// Rank `r` inside one preparation parent maps to `(j, β)`: rank 0 is
/// `(0, successor)`, the rest follow `(j, β)` lexicographically.
fn prep_components(a: &BigUint, rank: &BigUint, s: &BigUint) -> Result<(u64, u64), ConstructError> {
    let succ = cyclic(a, &BigUint::zero(), s);
    if rank.is_zero() {
        return Ok((0, to_index(&succ)?));
    }
    let mut lex = rank - 1u32;
    if lex >= succ {
        lex += 1u32;
    }
    let (j, b) = lex.div_rem(s);
    Ok((to_index(&j)?, to_index(&b)?))
}

fn prep_rank(a: &BigUint, j: u64, b: u64, s: &BigUint) -> BigUint {
    let succ = cyclic(a, &BigUint::zero(), s);
    let lex = BigUint::from(j) * s + b;
    if lex == succ {
        BigUint::zero()
    } else if lex < succ {
        lex + 1u32
    } else {
        lex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn base(s: u32) -> Arc<LevelSet> {
        Arc::new(LevelSet::base(s))
    }

    fn check_level(level: &LevelSet) -> Vec<Word> {
        let words = level.members().unwrap();
        assert_eq!(big(words.len() as u64), *level.size());
        let mut seen = HashSet::new();
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.len() as u64, level.len());
            assert_ne!(w[0], 0);
            assert_ne!(*w.last().unwrap(), 0);
            assert!(seen.insert(w.clone()), "duplicate member {w:?}");
            assert_eq!(level.index_of(w), Some(i as u64));
        }
        words
    }

    #[test]
    fn case_i_ordering_matches_hand_trace() {
        let x2 = LevelSet::case_i(base(4), big(4)).unwrap();
        let words = check_level(&x2);
        assert_eq!(words, vec![vec![1, 0, 2], vec![3, 0, 4], vec![4, 0, 1], vec![2, 0, 3]]);
    }

    /// Brute-force oracle for the pair-built ordering: enumerate `(a, t)`
    /// lexicographically, pull the pairing sequence to the front.
    fn oracle_order(s: u64, counts: &[u64]) -> Vec<(u64, u64)> {
        let mut pairing: Vec<u64> = (0..s / 2).map(|p| 2 * p).collect();
        pairing.push(s - 1);
        let mut out: Vec<(u64, u64)> = pairing.iter().map(|&a| (a, 0)).collect();
        for a in 0..s {
            for t in 0..counts[a as usize] {
                if !(t == 0 && pairing.contains(&a)) {
                    out.push((a, t));
                }
            }
        }
        out
    }

    #[test]
    fn spread_locate_matches_oracle() {
        for s in 2..9u64 {
            for total in s..=s * s {
                let spread = Spread::even(&big(s), &big(total));
                let counts: Vec<u64> = (0..s).map(|a| total / s + u64::from(a < total % s)).collect();
                let expected = oracle_order(s, &counts);
                assert_eq!(expected.len() as u64, total);
                for (idx, (a, t)) in expected.iter().enumerate() {
                    let got = spread.locate(idx as u64).unwrap();
                    assert_eq!(got, (big(*a), big(*t)), "s={s} total={total} idx={idx}");
                    assert_eq!(spread.position(&big(*a), &big(*t)), Some(big(idx as u64)));
                }
                assert!(spread.locate(total).is_none());
            }
        }
    }

    #[test]
    fn case_i_spread_13_over_4() {
        let x3 = Arc::new(LevelSet::case_i(base(4), big(4)).unwrap());
        let x4 = LevelSet::case_i(Arc::new(LevelSet::case_i(x3, big(4)).unwrap()), big(13)).unwrap();
        let LevelRule::CaseI { spread, .. } = x4.rule() else { panic!() };
        assert_eq!(spread.max_count(), big(4));
        assert_eq!(*spread.min_count(), big(3));
        check_level(&x4);
    }

    #[test]
    fn case_i_rejects_oversized_spread() {
        assert!(LevelSet::case_i(base(2), big(5)).is_err());
        assert!(LevelSet::case_i(base(4), big(3)).is_err());
    }

    #[test]
    fn prep_level_shape() {
        let parent = base(4);
        let level = LevelSet::case_ii_prep(parent, big(9)).unwrap();
        assert_eq!(level.len(), 8);
        let words = check_level(&level);
        // Pairing words: α 0^1 0^0 β 0^3 0^1 γ with β = γ = successor.
        assert_eq!(words[0], vec![1, 0, 2, 0, 0, 0, 0, 2]);
        assert_eq!(words[1], vec![3, 0, 4, 0, 0, 0, 0, 4]);
        assert_eq!(words[2], vec![4, 0, 1, 0, 0, 0, 0, 1]);
        for w in &words {
            let a = w[0];
            assert_eq!(w[7], a % 4 + 1);
        }
    }

    #[test]
    fn prep_rank_round_trip() {
        let s = big(5);
        for a in 0..5u64 {
            for rank in 0..(4 * 5) {
                let (j, b) = prep_components(&big(a), &big(rank), &s).unwrap();
                assert!(j <= 3);
                assert_eq!(prep_rank(&big(a), j, b, &s), big(rank));
            }
        }
    }

    #[test]
    fn square_level_has_all_pairs() {
        let x2 = Arc::new(LevelSet::case_i(base(4), big(4)).unwrap());
        let sq = LevelSet::square(x2.clone(), 2);
        let words = check_level(&sq);
        assert_eq!(words.len(), 16);
        assert_eq!(words[0], [x2.word(0).unwrap(), vec![0, 0], x2.word(1).unwrap()].concat());
    }

    #[test]
    fn case_iii_blocks() {
        // s_k = 20 words of length 1 is impossible over 4 letters, so use a seed.
        let words: Vec<Word> = (0..20u32).map(|i| vec![i / 4 + 1, 0, i % 4 + 1]).collect();
        let base = Arc::new(LevelSet::seed(5, words.clone()).unwrap());
        let level = LevelSet::case_iii(base.clone(), 3).unwrap();
        assert_eq!(level.len(), 15 * 3);
        assert_eq!(*level.size(), big(3));
        let members = check_level(&level);
        let join = |ids: &[usize]| {
            let mut out = Vec::new();
            for (u, &i) in ids.iter().enumerate() {
                if u > 0 {
                    out.extend([0, 0, 0]);
                }
                out.extend(&words[i]);
            }
            out
        };
        assert_eq!(members[0], join(&[0, 1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(members[2], join(&[16, 17, 18, 19, 0, 1, 2, 3]));
    }

    #[test]
    fn prefixes_are_consistent() {
        let x2 = Arc::new(LevelSet::case_i(base(4), big(4)).unwrap());
        let x3 = Arc::new(LevelSet::case_ii_prep(x2, big(7)).unwrap());
        let x4 = LevelSet::square(x3, 5);
        for idx in 0..20 {
            let full = x4.word(idx).unwrap();
            for len in [0, 1, 7, 24, 30, 50] {
                let mut out = Vec::new();
                x4.write_prefix(idx, len, &mut out).unwrap();
                assert_eq!(out[..], full[..len.min(full.len() as u64) as usize]);
            }
        }
    }

    #[test]
    fn non_members_are_rejected() {
        let x2 = LevelSet::case_i(base(4), big(4)).unwrap();
        assert!(!x2.contains(&[1, 0, 3]));
        assert!(!x2.contains(&[1, 1, 2]));
        assert!(!x2.contains(&[1, 0]));
        assert!(x2.contains(&[2, 0, 3]));
    }
}
