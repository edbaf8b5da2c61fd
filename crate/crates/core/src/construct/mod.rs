//! The level-by-level construction of a recurrent word whose complexity
//! follows a normalized growth function.
//!
//! Each call to [`ConstructionState::advance`] performs one dispatch of the
//! case diagram: at a balanced index it classifies the next step as Case I,
//! II or III; inside a Case II loop it decides between squaring and leaving
//! the loop. States are immutable values; advancing returns a new state.

mod level;
mod trace;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

pub use level::{LevelRule, LevelSet, Spread};
pub use trace::{check_trace, is_balanced, transition_allowed, CaseTag, TraceIssue, TraceRecord};

use crate::growth::{GrowthError, GrowthFunction};
use crate::Word;

/// Default cap on materialized prefix length (symbols).
pub const DEFAULT_MAX_SYMBOLS: u64 = 1 << 28;
/// Environment variable overriding [`DEFAULT_MAX_SYMBOLS`].
pub const MAX_SYMBOLS_ENV: &str = "SUBSHIFT_MAX_SYMBOLS";

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("index {index} is outside level {k}")]
    IndexOutOfRange { k: u64, index: u64 },
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AtBalanced,
    /// Inside a Case II run; `step` counts squarings attempted so far plus one.
    CaseIILoop {
        step: u64,
    },
    /// A Case III run is due from the current level.
    CaseIIIRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    I,
    II,
    III,
}

/// Memory budget for [`ConstructionState::omega_prefix`], from the environment.
pub fn max_symbols() -> u64 {
    std::env::var(MAX_SYMBOLS_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_SYMBOLS)
}

#[derive(Debug, Clone)]
pub struct ConstructionState {
    f: GrowthFunction,
    levels: Vec<Arc<LevelSet>>,
    phase: Phase,
    g: u64,
    trace: Vec<TraceRecord>,
}

fn require_normalized(f: &GrowthFunction) -> Result<BigUint, ConstructError> {
    if !f.is_normalized() {
        return Err(ConstructError::Normalization("growth function must be normalized first".into()));
    }
    let b = f.eval(1)?;
    if b < BigUint::from(8u32) {
        return Err(ConstructError::Normalization(format!("b = f(1) = {b} < 8")));
    }
    Ok(b)
}

/// Symbol for digit `d` of a synthetic seed word.
fn seed_words(n: u64, s: u64, sigma: u32) -> Result<Vec<Word>, ConstructError> {
    let capacity = BigUint::from(sigma).pow(n.min(64) as u32);
    if BigUint::from(s) > capacity {
        return Err(ConstructError::Consistency(format!("{s} distinct words of length {n} need more than {sigma} letters")));
    }
    Ok((0..s)
        .map(|i| {
            let mut word = vec![1u32; n as usize];
            let mut rest = i;
            for slot in word.iter_mut().rev() {
                if rest == 0 {
                    break;
                }
                *slot = (rest % sigma as u64) as u32 + 1;
                rest /= sigma as u64;
            }
            word
        })
        .collect())
}

impl ConstructionState {
    /// `n_1 = 1`, `s_1 = ⌊b/2⌋`, `X_1 = {1, …, s_1}`.
    pub fn init(f: &GrowthFunction) -> Result<Self, ConstructError> {
        let b = require_normalized(f)?;
        let sigma =
            (&b >> 1u32).to_u32().ok_or_else(|| ConstructError::Resource(format!("alphabet ⌊{b}/2⌋ does not fit 32 bits")))?;
        let base = LevelSet::base(sigma);
        let mut state = ConstructionState { f: f.clone(), levels: Vec::new(), phase: Phase::AtBalanced, g: 0, trace: Vec::new() };
        state.push(base, CaseTag::Init, 0, true, Phase::AtBalanced)?;
        Ok(state)
    }

    /// Resumes the construction from an explicit balanced level `X_k`.
    pub fn from_seed(f: &GrowthFunction, k: u64, words: Vec<Word>, g: u64) -> Result<Self, ConstructError> {
        require_normalized(f)?;
        let level = LevelSet::seed(k, words)?;
        let mut state = ConstructionState { f: f.clone(), levels: Vec::new(), phase: Phase::AtBalanced, g, trace: Vec::new() };
        state.push(level, CaseTag::Init, g, true, Phase::AtBalanced)?;
        Ok(state)
    }

    /// [`from_seed`](Self::from_seed) with `s` synthetic distinct words of
    /// length `n` over the letters `1..=⌊b/2⌋`.
    pub fn from_synthetic_seed(f: &GrowthFunction, k: u64, n: u64, s: u64) -> Result<Self, ConstructError> {
        let sigma = (require_normalized(f)? >> 1u32).to_u32().unwrap_or(u32::MAX);
        Self::from_seed(f, k, seed_words(n, s, sigma)?, 0)
    }

    pub fn f(&self) -> &GrowthFunction {
        &self.f
    }

    pub fn level(&self) -> &Arc<LevelSet> {
        self.levels.last().expect("state always has a level")
    }

    pub fn levels(&self) -> &[Arc<LevelSet>] {
        &self.levels
    }

    /// The level with index `k`, if this state built it.
    pub fn level_at(&self, k: u64) -> Option<&Arc<LevelSet>> {
        self.levels.iter().find(|l| l.k() == k)
    }

    pub fn k(&self) -> u64 {
        self.level().k()
    }

    pub fn n(&self) -> u64 {
        self.level().len()
    }

    pub fn s(&self) -> &BigUint {
        self.level().size()
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    fn push(&mut self, level: LevelSet, case: CaseTag, g: u64, balanced: bool, phase: Phase) -> Result<(), ConstructError> {
        if balanced && !is_balanced(&self.f, level.len(), level.size())? {
            return Err(ConstructError::Consistency(format!(
                "{case} produced (n, s) = ({}, {}), which is not balanced",
                level.len(),
                level.size()
            )));
        }
        self.trace.push(TraceRecord { k: level.k(), case, n: level.len(), s: level.size().clone(), g, balanced });
        self.levels.push(Arc::new(level));
        self.g = g;
        self.phase = phase;
        Ok(())
    }

    fn expect_phase(&self, want: Phase, op: &str) -> Result<(), ConstructError> {
        let ok = match (want, self.phase) {
            (Phase::CaseIILoop { .. }, Phase::CaseIILoop { .. }) => true,
            (a, b) => a == b,
        };
        if ok {
            Ok(())
        } else {
            Err(ConstructError::Consistency(format!("{op} called in phase {:?}", self.phase)))
        }
    }

    /// III if `6ns > f(3n)`, II if `6ns² < f(3n)`, I otherwise.
    pub fn classify(&self) -> Result<Case, ConstructError> {
        self.expect_phase(Phase::AtBalanced, "classify")?;
        let (n, s) = (self.n(), self.s());
        let f3 = self.f.eval(3 * n)?;
        let ns6 = s * n * 6u32;
        Ok(if ns6 > f3 {
            Case::III
        } else if &ns6 * s < f3 {
            Case::II
        } else {
            Case::I
        })
    }

    fn case_i_level(&self) -> Result<LevelSet, ConstructError> {
        let n = self.n();
        let size = self.f.eval(3 * n)? / (6 * n);
        LevelSet::case_i(Arc::clone(self.level()), size)
    }

    /// `n' = 3n`, `s' = ⌊f(3n)/6n⌋`, members `α 0^n β` with `β ∈ Y(α)`.
    pub fn step_case_i(&self) -> Result<Self, ConstructError> {
        if self.classify()? != Case::I {
            return Err(ConstructError::Consistency("Case I step requested outside Case I".into()));
        }
        let mut next = self.clone();
        next.push(self.case_i_level()?, CaseTag::I, self.n(), true, Phase::AtBalanced)?;
        Ok(next)
    }

    /// `n' = 8n`, `g = 6n`, `s' = min{⌊f(8n)/16n⌋, max{s, f(⌊n/3⌋)}}`.
    pub fn step_case_ii_prep(&self) -> Result<Self, ConstructError> {
        if self.classify()? != Case::II {
            return Err(ConstructError::Consistency("Case II preparation requested outside Case II".into()));
        }
        let n = self.n();
        let by_growth = self.f.eval(8 * n)? / (16 * n);
        let by_floor = self.s().clone().max(self.f.eval(n / 3)?);
        let balanced = by_growth <= by_floor;
        let size = by_growth.min(by_floor);
        let level = LevelSet::case_ii_prep(Arc::clone(self.level()), size)?;
        let phase = if balanced { Phase::AtBalanced } else { Phase::CaseIILoop { step: 1 } };
        let mut next = self.clone();
        next.push(level, CaseTag::IIPrep, 6 * n, balanced, phase)?;
        Ok(next)
    }

    /// `(g̃, ñ)` with `g̃ = max{g, ⌈n/k²⌉}` and `ñ = 2n + g̃`.
    pub fn tilde(&self) -> (u64, u64) {
        let (n, k) = (self.n(), self.k());
        let g = self.g.max(n.div_ceil(k.saturating_mul(k)));
        (g, 2 * n + g)
    }

    fn squares_fit(&self) -> Result<bool, ConstructError> {
        let (_, n_tilde) = self.tilde();
        let s = self.s();
        Ok(self.f.eval(n_tilde)? >= s * s * n_tilde * 2u32)
    }

    /// `X·0^g̃·X` while `f(ñ) >= 2ñs²`.
    pub fn step_case_ii_sub1(&self) -> Result<Self, ConstructError> {
        self.expect_phase(Phase::CaseIILoop { step: 0 }, "Sub-Case (1)")?;
        if !self.squares_fit()? {
            return Err(ConstructError::Consistency("Sub-Case (1) requires f(ñ) >= 2ñs²".into()));
        }
        let Phase::CaseIILoop { step } = self.phase else { unreachable!() };
        let (g, _) = self.tilde();
        let mut next = self.clone();
        next.push(
            LevelSet::square(Arc::clone(self.level()), g),
            CaseTag::IISub1,
            g,
            false,
            Phase::CaseIILoop { step: step + 1 },
        )?;
        Ok(next)
    }

    /// Leaves the Case II loop through branch (a), (b) or (c).
    pub fn step_case_ii_sub2(&self) -> Result<Self, ConstructError> {
        self.expect_phase(Phase::CaseIILoop { step: 0 }, "Sub-Case (2)")?;
        if self.squares_fit()? {
            return Err(ConstructError::Consistency("Sub-Case (2) requires f(ñ) < 2ñs²".into()));
        }
        let (n, s) = (self.n(), self.s().clone());
        let f3 = self.f.eval(3 * n)?;
        let ns6 = &s * n * 6u32;
        let mut next = self.clone();
        if &ns6 * &s < f3 {
            let (g_tilde, n_tilde) = self.tilde();
            let s2 = &s * &s;
            let fits = |m: u64| -> Result<bool, ConstructError> { Ok(self.f.eval(m)? >= &s2 * m * 2u32) };
            let (mut lo, mut hi) = (n_tilde, 3 * n);
            if !fits(hi)? {
                return Err(ConstructError::Consistency(format!("Sub-Case (2)(b): f(3n) < 6ns² fails at n = {n}")));
            }
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if fits(mid)? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let gap = lo - 2 * n;
            debug_assert!(gap >= g_tilde);
            next.push(LevelSet::square(Arc::clone(self.level()), gap), CaseTag::IISub2b, gap, true, Phase::AtBalanced)?;
        } else if ns6 > f3 {
            let rec = TraceRecord { case: CaseTag::IISub2c, balanced: true, ..self.trace.last().expect("trace").clone() };
            if !is_balanced(&self.f, rec.n, &rec.s)? {
                return Err(ConstructError::Consistency(format!("Sub-Case (2)(c) at k = {} is not balanced", rec.k)));
            }
            next.trace.push(rec);
            next.phase = Phase::CaseIIIRun;
        } else {
            next.push(self.case_i_level()?, CaseTag::IISub2a, n, true, Phase::AtBalanced)?;
        }
        Ok(next)
    }

    /// Halves the level repeatedly from the frozen base `X_k` until the
    /// size drops to `f(n)/2n` or below; that last level is balanced.
    pub fn run_case_iii(&self) -> Result<Self, ConstructError> {
        let due = match self.phase {
            Phase::CaseIIIRun => true,
            Phase::AtBalanced => self.classify()? == Case::III,
            Phase::CaseIILoop { .. } => false,
        };
        if !due {
            return Err(ConstructError::Consistency("Case III run requested outside Case III".into()));
        }
        let base = Arc::clone(self.level());
        let mut next = self.clone();
        for step in 1u32.. {
            let level = LevelSet::case_iii(Arc::clone(&base), step)?;
            let n = level.len();
            let over = level.size() * n * 2u32 > self.f.eval(n)?;
            if over {
                next.push(level, CaseTag::IIIStep, base.len(), false, Phase::CaseIIIRun)?;
            } else {
                next.push(level, CaseTag::IIIFinal, base.len(), true, Phase::AtBalanced)?;
                break;
            }
        }
        Ok(next)
    }

    /// One dispatch of the case diagram.
    pub fn advance(&self) -> Result<Self, ConstructError> {
        match self.phase {
            Phase::AtBalanced => match self.classify()? {
                Case::I => self.step_case_i(),
                Case::II => self.step_case_ii_prep(),
                Case::III => self.run_case_iii(),
            },
            Phase::CaseIILoop { .. } => {
                if self.squares_fit()? {
                    self.step_case_ii_sub1()
                } else {
                    self.step_case_ii_sub2()
                }
            }
            Phase::CaseIIIRun => self.run_case_iii(),
        }
    }

    /// Advances until `n_k >= n`.
    pub fn advance_until(&self, n: u64) -> Result<Self, ConstructError> {
        let mut state = self.clone();
        while state.n() < n {
            state = state.advance()?;
        }
        Ok(state)
    }

    /// The first `len` symbols of the limit word, together with the state
    /// that was advanced far enough to produce them.
    pub fn omega_prefix(&self, len: u64) -> Result<(Word, Self), ConstructError> {
        let budget = max_symbols();
        if len > budget {
            return Err(ConstructError::Resource(format!(
                "prefix of {len} symbols exceeds the budget of {budget} (set {MAX_SYMBOLS_ENV})"
            )));
        }
        let state = self.advance_until(len)?;
        let mut out = Vec::with_capacity(len as usize);
        state.level().write_prefix(0, len, &mut out)?;
        Ok((out, state))
    }

    /// Alphabet size `⌊b/2⌋ + 1` including the gap letter.
    pub fn alphabet_size(&self) -> Result<u32, ConstructError> {
        let b = self.f.eval(1)?;
        Ok((b >> 1u32).to_u32().unwrap_or(u32::MAX).saturating_add(1))
    }
}

/// Length of `ω` needed to see every member of balanced level `k` with its
/// padding: `n_{k + ⌈log₂ s_k⌉ + 2}`, or `None` if the trace does not reach
/// that level.
pub fn visibility_horizon(trace: &[TraceRecord], k: u64) -> Option<u64> {
    let rec = trace.iter().find(|r| r.k == k)?;
    let log = (&rec.s - 1u32).bits();
    let target = k + log + 2;
    trace.iter().find(|r| r.k == target).map(|r| r.n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> GrowthFunction {
        GrowthFunction::parse(src).unwrap().normalize()
    }

    fn chain(state: &ConstructionState) -> Vec<(u64, u64, CaseTag)> {
        state.trace().iter().map(|r| (r.n, r.s.to_u64().unwrap_or(u64::MAX), r.case)).collect()
    }

    #[test]
    fn init_requires_normalized_and_b_at_least_8() {
        assert!(matches!(ConstructionState::init(&GrowthFunction::parse("n+1").unwrap()), Err(ConstructError::Normalization(_))));
        let small = GrowthFunction::from_table(vec![1u32, 4, 8].into_iter().map(BigUint::from).collect()).normalize();
        assert!(ConstructionState::init(&small).is_ok());
    }

    #[test]
    fn quad_chain_is_case_i() {
        let mut state = ConstructionState::init(&f("max(8*n, n^2)")).unwrap();
        assert_eq!(state.level().members().unwrap(), vec![vec![1], vec![2], vec![3], vec![4]]);
        for _ in 0..3 {
            state = state.advance().unwrap();
        }
        use CaseTag::*;
        assert_eq!(chain(&state), vec![(1, 4, Init), (3, 4, I), (9, 4, I), (27, 13, I)]);
        assert_eq!(chain(&state.advance().unwrap())[4], (81, 40, I));
    }

    #[test]
    fn exp_chain_from_init() {
        let mut state = ConstructionState::init(&f("max(8*n, 2^n)")).unwrap();
        for _ in 0..4 {
            state = state.advance().unwrap();
        }
        use CaseTag::*;
        assert_eq!(chain(&state), vec![(1, 4, Init), (3, 4, I), (24, 8, IIPrep), (66, 64, IISub1), (150, 4096, IISub1)]);
        assert_eq!(state.trace()[2].g, 18);
    }

    #[test]
    fn exp_chain_from_balanced_seed() {
        let fx = f("max(8*n, 2^n)");
        let seed = ConstructionState::from_synthetic_seed(&fx, 3, 9, 9).unwrap();
        assert_eq!(seed.classify().unwrap(), Case::II);
        let prep = seed.advance().unwrap();
        let last = prep.trace().last().unwrap();
        assert_eq!((last.n, last.s.to_u64().unwrap(), last.g, last.balanced), (72, 24, 54, false));
        assert_eq!(prep.tilde(), (54, 198));
        let sub1 = prep.advance().unwrap();
        let last = sub1.trace().last().unwrap();
        assert_eq!((last.case, last.n, last.s.to_u64().unwrap()), (CaseTag::IISub1, 198, 576));
    }

    #[test]
    fn flat_case_iii_run() {
        let ff = f("max(8*n, min(n^2, 3000))");
        let seed = ConstructionState::from_synthetic_seed(&ff, 5, 60, 20).unwrap();
        assert_eq!(seed.classify().unwrap(), Case::III);
        let run = seed.advance().unwrap();
        use CaseTag::*;
        assert_eq!(chain(&run)[1..], [(180, 10, IIIStep), (420, 5, IIIStep), (900, 3, IIIFinal)]);
        let LevelRule::CaseIII { step, .. } = run.level().rule() else { panic!() };
        assert_eq!(*step, 3);
        assert_eq!(run.level().members().unwrap().len(), 3);
    }

    #[test]
    fn first_words_chain() {
        for src in ["max(8*n, n^2)", "max(8*n, 2^n)", "max(8*n, min(n^2, 3000))", "n+1"] {
            let mut state = ConstructionState::init(&f(src)).unwrap();
            while state.n() < 4000 {
                state = state.advance().unwrap();
            }
            let words: Vec<Word> = state
                .levels()
                .iter()
                .map(|l| {
                    let mut w = Vec::new();
                    l.write_prefix(0, 4000, &mut w).unwrap();
                    w
                })
                .collect();
            for pair in words.windows(2) {
                assert!(pair[1].starts_with(&pair[0]), "{src}");
            }
            assert!(check_trace(state.f(), state.trace()).unwrap().is_empty(), "{src}");
        }
    }

    #[test]
    fn omega_prefix_examples() {
        let state = ConstructionState::init(&f("max(8*n, n^2)")).unwrap();
        let (nine, _) = state.omega_prefix(9).unwrap();
        assert_eq!(nine, vec![1, 0, 2, 0, 0, 0, 3, 0, 4]);
        let (five, _) = state.omega_prefix(5).unwrap();
        assert_eq!(five, vec![1, 0, 2, 0, 0]);
    }

    #[test]
    fn sub2b_searches_least_m() {
        // Table f with f(m) >= 2m·100 first at m = 260; n = 100, s = 10.
        let mut values = vec![BigUint::from(1u32)];
        for m in 1..=1000u64 {
            let v = if m >= 260 { 200 * m + 1 } else { 100 * m };
            values.push(BigUint::from(v.max(8 * m)));
        }
        let ff = GrowthFunction::from_table(values).normalize();
        let words = seed_words(100, 10, 4).unwrap();
        let mut state = ConstructionState::from_seed(&ff, 7, words, 50).unwrap();
        state.phase = Phase::CaseIILoop { step: 1 };
        assert_eq!(state.tilde(), (50, 250));
        let next = state.step_case_ii_sub2().unwrap();
        let last = next.trace().last().unwrap();
        assert_eq!((last.case, last.n, last.g), (CaseTag::IISub2b, 260, 60));
    }

    #[test]
    fn visibility_horizon_uses_log_of_size() {
        let state = ConstructionState::init(&f("max(8*n, n^2)")).unwrap().advance_until(1000).unwrap();
        // s_1 = 4 → ⌈log₂ 4⌉ = 2 → level 5.
        assert_eq!(visibility_horizon(state.trace(), 1), Some(state.trace()[4].n));
    }
}
