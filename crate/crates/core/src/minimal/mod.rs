//! A minimal subshift whose complexity sits between `f(n)` and `n·f(n)`.
//!
//! Level `n` keeps a set `W(2^n)` of length-`2^n` words and picks a subset
//! `C(2^n)` of size `c_{2^n}`; then `W(2^{n+1}) = W(2^n)C(2^n)`. A queue `U`
//! of pending words forces every word to be absorbed into some later `C`,
//! which makes the generated subshift minimal.

mod recurrence;

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use recurrence::{uniform_recurrence, uniform_recurrence_window};

use crate::analyze::ComplexityProfile;
use crate::growth::{GrowthError, GrowthFunction};
use crate::report::{CheckRecord, Report, Verdict};
use crate::Word;

#[derive(Debug, Error)]
pub enum MinimalError {
    #[error("construction error: {0}")]
    Construction(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("no mu <= {limit} satisfies the spacing inequality for n = {n}")]
    NotFound { n: u64, limit: u64 },
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

fn f_pow(f: &GrowthFunction, e: u64) -> Result<BigUint, MinimalError> {
    let arg = 1u64
        .checked_shl(e as u32)
        .filter(|_| e < 64)
        .ok_or_else(|| MinimalError::Resource(format!("2^{e} does not fit 64 bits")))?;
    Ok(f.eval(arg)?)
}

/// `c_1, c_2, c_4, …, c_{2^max_depth}` (entry `n` is `c_{2^n}`), checking
/// `f(2^{n+1}) <= b·c_1⋯c_{2^n} <= 4f(2^{n+1})` at every level.
pub fn c_sequence(f: &GrowthFunction, max_depth: u64) -> Result<Vec<BigUint>, MinimalError> {
    let b = f.eval(1)?;
    let mut product = b.clone();
    let mut out = Vec::with_capacity(max_depth as usize + 1);
    for n in 0..=max_depth {
        let here = f_pow(f, n)?;
        let next = f_pow(f, n + 1)?;
        let c = if n == 0 || product < &here * 2u32 { Integer::div_ceil(&next, &here) } else { &next / &here };
        if c.is_zero() {
            return Err(MinimalError::Construction(format!("c_(2^{n}) = 0; f decreases between 2^{n} and 2^{}", n + 1)));
        }
        product *= &c;
        if !(next <= product && product <= &next * 4u32) {
            return Err(MinimalError::Construction(format!(
                "bound on c fails at n = {n}: f(2^{}) = {next}, b*c_1*...*c_(2^{n}) = {product}",
                n + 1
            )));
        }
        out.push(c);
    }
    Ok(out)
}

/// `⌈f(2^{m+1})/f(2^m)⌉ · 4f(2^n) <= f(2^m)`.
fn spacing_holds(f: &GrowthFunction, n: u64, m: u64) -> Result<bool, MinimalError> {
    let fm = f_pow(f, m)?;
    let ratio = Integer::div_ceil(&f_pow(f, m + 1)?, &fm);
    Ok(ratio * f_pow(f, n)? * 4u32 <= fm)
}

/// Least `μ <= search_limit` with `⌈f(2^{μ+1})/f(2^μ)⌉ <= f(2^μ)/(4f(2^n))`.
pub fn find_mu(f: &GrowthFunction, n: u64, search_limit: u64) -> Result<u64, MinimalError> {
    for mu in 0..=search_limit {
        if 1u128 << (mu + 1).min(127) > f.horizon() as u128 {
            break;
        }
        if spacing_holds(f, n, mu)? {
            return Ok(mu);
        }
    }
    Err(MinimalError::NotFound { n, limit: search_limit })
}

/// A run of consecutive members of `W(2^level)` waiting in `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pending {
    level: u64,
    next: BigUint,
    end: BigUint,
}

/// Which branch chose `C(2^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    /// Taken from `u·C(2^p)⋯C(2^{n-1})` where `u` is member `index` of `W(2^p)`.
    Absorbed { p: u64, index: BigUint },
    /// The first members of `W(2^n)`.
    Default,
}

#[derive(Debug, Clone)]
pub struct MinimalState {
    f: GrowthFunction,
    b: BigUint,
    c: Vec<BigUint>,
    /// `|W(2^n)|`, computed by multiplying out the chosen sets.
    w_sizes: Vec<BigUint>,
    /// `C(2^n)` as indices into `W(2^n)`.
    chosen: Vec<Vec<BigUint>>,
    choices: Vec<Choice>,
    pending: VecDeque<Pending>,
    /// Levels the current head of `U` has waited, per level.
    head_age: Vec<u64>,
}

/// Runs levels `0..depth`, producing `C(1), …, C(2^{depth-1})` and
/// `W(1), …, W(2^depth)`.
pub fn build_minimal(f: &GrowthFunction, depth: u64) -> Result<MinimalState, MinimalError> {
    let c = c_sequence(f, depth)?;
    let b = f.eval(1)?;
    let mut state = MinimalState {
        f: f.clone(),
        b: b.clone(),
        c,
        w_sizes: vec![b.clone()],
        chosen: Vec::new(),
        choices: Vec::new(),
        pending: VecDeque::from([Pending { level: 0, next: BigUint::zero(), end: b }]),
        head_age: Vec::new(),
    };
    let mut age = 0u64;
    for n in 0..depth {
        let want = state.c[n as usize]
            .to_usize()
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| MinimalError::Resource(format!("c_(2^{n}) = {} is too large to store", state.c[n as usize])))?;
        let head = state.pending.front().map(|h| (h.level, h.next.clone()));
        let absorb = match &head {
            Some((p, _)) if *p < n => spacing_holds(f, *p, n)?,
            _ => false,
        };
        let members = if let (true, Some((p, u))) = (absorb, head) {
            let members = state.absorbing_choice(p, &u, n, want)?;
            let front = state.pending.front_mut().expect("head exists");
            front.next += 1u32;
            if front.next == front.end {
                state.pending.pop_front();
            }
            state.choices.push(Choice::Absorbed { p, index: u });
            age = 0;
            members
        } else {
            let available = &state.w_sizes[n as usize];
            if BigUint::from(want) > *available {
                return Err(MinimalError::Construction(format!("|W(2^{n})| = {available} < c_(2^{n}) = {want}")));
            }
            state.choices.push(Choice::Default);
            age += 1;
            (0..want).map(BigUint::from).collect()
        };
        state.head_age.push(age);
        let size = &state.w_sizes[n as usize] * members.len();
        state.chosen.push(members);
        state.pending.push_back(Pending { level: n + 1, next: BigUint::zero(), end: size.clone() });
        state.w_sizes.push(size);
    }
    Ok(state)
}

impl MinimalState {
    /// Number of completed levels.
    pub fn depth(&self) -> u64 {
        self.chosen.len() as u64
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    /// `c_{2^n}` for `n = 0..=depth`.
    pub fn c(&self) -> &[BigUint] {
        &self.c
    }

    /// `b·c_1⋯c_{2^{n-1}}`.
    pub fn c_product(&self, n: u64) -> BigUint {
        self.c[..n as usize].iter().fold(self.b.clone(), |acc, c| acc * c)
    }

    /// `|W(2^n)|` for `n = 0..=depth`.
    pub fn w_sizes(&self) -> &[BigUint] {
        &self.w_sizes
    }

    pub fn chosen(&self, n: u64) -> &[BigUint] {
        &self.chosen[n as usize]
    }

    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    /// Levels the head of `U` had been waiting after each level.
    pub fn head_age(&self) -> &[u64] {
        &self.head_age
    }

    /// The first `want` members of `Y = u·C(2^p)⋯C(2^{n-1})`, in mixed-radix
    /// order with the `C(2^{n-1})` choice varying fastest.
    fn absorbing_choice(&self, p: u64, u: &BigUint, n: u64, want: usize) -> Result<Vec<BigUint>, MinimalError> {
        let radices: Vec<usize> = (p..n).map(|m| self.chosen[m as usize].len()).collect();
        let total: BigUint = radices.iter().fold(BigUint::one(), |acc, r| acc * *r);
        if total < BigUint::from(want) {
            return Err(MinimalError::Construction(format!("|u*C(2^{p})*...*C(2^{})| = {total} < c_(2^{n}) = {want}", n - 1)));
        }
        let mut digits = vec![0usize; radices.len()];
        let mut out = Vec::with_capacity(want);
        for _ in 0..want {
            let mut idx = u.clone();
            // W(2^{m+1}) lists w·C[j] by (w, j), so appending C[j] maps w to w·|C| + j.
            for (m, &d) in (p..n).zip(&digits) {
                idx = idx * self.chosen[m as usize].len() + d;
            }
            out.push(idx);
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < radices[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        Ok(out)
    }

    /// Member `idx` of `W(2^n)`.
    pub fn word(&self, n: u64, idx: &BigUint) -> Result<Word, MinimalError> {
        if idx >= &self.w_sizes[n as usize] {
            return Err(MinimalError::Construction(format!("index {idx} outside W(2^{n})")));
        }
        let mut out = Vec::with_capacity(1 << n);
        self.write_word(n, idx, &mut out)?;
        Ok(out)
    }

    fn write_word(&self, n: u64, idx: &BigUint, out: &mut Word) -> Result<(), MinimalError> {
        if n == 0 {
            out.push(idx.to_u32().ok_or_else(|| MinimalError::Resource(format!("letter {idx} exceeds 32 bits")))?);
            return Ok(());
        }
        let width = self.chosen[n as usize - 1].len();
        let (parent, j) = idx.div_rem(&BigUint::from(width));
        self.write_word(n - 1, &parent, out)?;
        let j = j.to_usize().expect("j < |C|");
        let suffix = self.chosen[n as usize - 1][j].clone();
        self.write_word(n - 1, &suffix, out)
    }

    /// `W(1)[0]·C(1)[0]·C(2)[0]⋯C(2^{depth-1})[0]`, of length `2^depth`.
    pub fn emitted(&self) -> Result<Word, MinimalError> {
        let depth = self.depth();
        let budget = crate::construct::max_symbols();
        if depth >= 63 || 1u64 << depth > budget {
            return Err(MinimalError::Resource(format!("emitting 2^{depth} symbols exceeds the budget of {budget}")));
        }
        let mut out = vec![0u32];
        for n in 0..depth {
            self.write_word(n, &self.chosen[n as usize][0], &mut out)?;
        }
        Ok(out)
    }

    /// Bound on `c`, cardinalities, complexity bounds and uniform recurrence.
    pub fn checks(&self, word: &[u32], profile: &ComplexityProfile, max_window_len: usize) -> Result<Report, MinimalError> {
        let mut report = Report::default();
        let f = &self.f;
        for n in 0..self.c.len() as u64 {
            let product = self.c_product(n + 1);
            let next = f_pow(f, n + 1)?;
            report.push(CheckRecord::test(
                "bound-c",
                format!("n={n}"),
                format!("{next} <= b*c_1*...*c_(2^{n}) <= {}", &next * 4u32),
                product.to_string(),
                next <= product && product <= next * 4u32,
            ));
        }
        for n in 0..=self.depth() {
            let expected = self.c_product(n);
            report.push(CheckRecord::test(
                "w-size",
                format!("n={n}"),
                format!("|W(2^{n})| = {expected}"),
                self.w_sizes[n as usize].to_string(),
                self.w_sizes[n as usize] == expected,
            ));
        }
        for n in 0..self.depth().min(62) {
            let len = 1usize << n;
            let Some(p) = profile.get(len) else { break };
            let p = BigUint::from(p);
            let upper = self.c_product(n + 1) << (n + 2);
            let ceiling = f_pow(f, n + 1)? << (n + 4);
            report.push(CheckRecord::test(
                "minimal-upper",
                format!("n={n}"),
                format!("p(2^{n}) <= {upper} <= {ceiling}"),
                p.to_string(),
                p <= upper && upper <= ceiling,
            ));
            let floor = f_pow(f, n)?;
            report.push(if len <= profile.reliable_horizon() {
                CheckRecord::test("minimal-lower", format!("n={n}"), format!("p(2^{n}) >= {floor}"), p.to_string(), p >= floor)
            } else {
                CheckRecord::new(
                    "minimal-lower",
                    format!("n={n}"),
                    format!("p(2^{n}) >= {floor}"),
                    "beyond reliable horizon",
                    Verdict::Skipped,
                )
            });
        }
        let mut r = 0usize;
        for l in 1..=max_window_len.min(word.len()) {
            r = r.max(uniform_recurrence_window(word, l));
            let witnessed = r <= word.len() / 2;
            let mut rec = CheckRecord::new(
                "uniform-recurrence",
                format!("L={l}"),
                format!("R(L) <= {}", word.len() / 2),
                r.to_string(),
                if witnessed { Verdict::Pass } else { Verdict::Fail },
            );
            rec.r_of_l = Some(r.to_string());
            report.push(rec);
        }
        let oldest = self.head_age.iter().copied().max().unwrap_or(0);
        report.push(CheckRecord::new(
            "u-head-age",
            format!("levels=0..{}", self.depth()),
            "head of U is eventually absorbed",
            format!(
                "longest wait {oldest} levels; {} absorptions",
                self.choices.iter().filter(|c| matches!(c, Choice::Absorbed { .. })).count()
            ),
            Verdict::Pass,
        ));
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn quad() -> GrowthFunction {
        GrowthFunction::parse("max(8*n, n^2)").unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn quad_c_sequence() {
        let c = c_sequence(&quad(), 20).unwrap();
        assert_eq!(c[..4], [big(2), big(2), big(2), big(4)]);
        assert!(c[4..].iter().all(|v| *v == big(4)));
    }

    #[test]
    fn linear_c_values_are_positive() {
        let f = GrowthFunction::parse("n+1").unwrap().normalize();
        assert!(c_sequence(&f, 15).unwrap().iter().all(|c| !c.is_zero()));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(find_mu(&quad(), 3, 20).unwrap(), 5);
        let exp = GrowthFunction::parse("max(8*n, 2^n)").unwrap().normalize();
        assert!(matches!(find_mu(&exp, 1, 12), Err(MinimalError::NotFound { .. })));
    }

    #[test]
    fn sizes_and_members() {
        let state = build_minimal(&quad(), 4).unwrap();
        let sizes: Vec<u64> = state.w_sizes().iter().map(|s| s.to_u64().unwrap()).collect();
        assert_eq!(sizes, vec![8, 16, 32, 64, 256]);
        for n in 0..=4u64 {
            let words: HashSet<Word> = (0..sizes[n as usize]).map(|i| state.word(n, &big(i)).unwrap()).collect();
            assert_eq!(words.len() as u64, sizes[n as usize]);
            assert!(words.iter().all(|w| w.len() == 1 << n));
        }
    }

    #[test]
    fn members_split_into_parent_and_choice() {
        let state = build_minimal(&quad(), 6).unwrap();
        for n in 1..=6u64 {
            let half = 1usize << (n - 1);
            let parents: HashSet<Word> =
                (0..state.w_sizes()[n as usize - 1].to_u64().unwrap()).map(|i| state.word(n - 1, &big(i)).unwrap()).collect();
            let chosen: HashSet<Word> = state.chosen(n - 1).iter().map(|i| state.word(n - 1, i).unwrap()).collect();
            for i in (0..state.w_sizes()[n as usize].to_u64().unwrap()).step_by(7) {
                let w = state.word(n, &big(i)).unwrap();
                assert!(parents.contains(&w[..half]));
                assert!(chosen.contains(&w[half..]));
            }
        }
    }

    #[test]
    fn emitted_prefix_chain() {
        let a = build_minimal(&quad(), 8).unwrap().emitted().unwrap();
        let b = build_minimal(&quad(), 9).unwrap().emitted().unwrap();
        assert_eq!(a.len(), 256);
        assert!(b.starts_with(&a));
        let state = build_minimal(&quad(), 8).unwrap();
        assert_eq!(state.word(8, &big(0)).unwrap(), a);
    }

    #[test]
    fn absorption_uses_the_head_of_u() {
        let state = build_minimal(&quad(), 10).unwrap();
        let absorbed: Vec<(u64, u64)> = state
            .choices()
            .iter()
            .filter_map(|c| match c {
                Choice::Absorbed { p, index } => Some((*p, index.to_u64().unwrap())),
                Choice::Default => None,
            })
            .collect();
        // Letters leave U in order once 32·⌈f(2^{n+1})/f(2^n)⌉ <= f(2^n).
        assert_eq!(absorbed, (0..6).map(|i| (0, i)).collect::<Vec<_>>());
        for (n, choice) in state.choices().iter().enumerate() {
            if let Choice::Absorbed { p, index } = choice {
                let u = state.word(*p, index).unwrap();
                for member in state.chosen(n as u64) {
                    assert!(state.word(n as u64, member).unwrap().starts_with(&u));
                }
            }
        }
    }
}
