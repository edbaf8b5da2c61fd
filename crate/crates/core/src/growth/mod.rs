//! Growth functions `f: N -> N`: exact evaluation, validation against the
//! realizability hypotheses, normalization, and the discrete
//! derivative/cumulative pair.

mod counterexample;
mod expr;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub use counterexample::{counterexample_derivative, counterexample_table, CounterexampleRow};
pub use expr::{Expr, ExprError, ParseError, MAX_VALUE_BITS};

/// Default largest argument a growth function may be evaluated at.
pub const DEFAULT_HORIZON: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("f({n}) evaluates to 0; growth functions must be positive")]
    Zero { n: u64 },
    #[error("argument {n} is beyond the evaluation horizon {horizon}")]
    Horizon { n: u64, horizon: u64 },
    #[error("evaluating f({n}): {source}")]
    Expr { n: u64, source: ExprError },
    #[error("sequence decreases at index {index}")]
    Decreasing { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definition {
    Expr(Expr),
    /// `values[n]` is `f(n)`; the horizon is `values.len() - 1`.
    Table(Vec<BigUint>),
}

#[derive(Debug)]
struct Inner {
    definition: Definition,
    horizon: u64,
    // Raw (un-normalized) values; shared between f and its normalization.
    memo: RwLock<HashMap<u64, BigUint>>,
}

/// A growth function with a memoized exact evaluator.
///
/// Cloning is cheap and clones share the memo. The normalized form
/// `f~(0) = 1`, `f~(n) = max(f(n), 8n)` shares the memo of the raw function.
#[derive(Debug, Clone)]
pub struct GrowthFunction {
    inner: Arc<Inner>,
    normalized: bool,
}

impl GrowthFunction {
    pub fn from_expr(expr: Expr) -> Self {
        Self::with_horizon(Definition::Expr(expr), DEFAULT_HORIZON)
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        Expr::parse(src).map(Self::from_expr)
    }

    pub fn from_table(values: Vec<BigUint>) -> Self {
        let horizon = values.len().saturating_sub(1) as u64;
        Self::with_horizon(Definition::Table(values), horizon)
    }

    pub fn with_horizon(definition: Definition, horizon: u64) -> Self {
        let horizon = match &definition {
            Definition::Table(values) => horizon.min(values.len().saturating_sub(1) as u64),
            Definition::Expr(_) => horizon,
        };
        GrowthFunction { inner: Arc::new(Inner { definition, horizon, memo: RwLock::new(HashMap::new()) }), normalized: false }
    }

    pub fn definition(&self) -> &Definition {
        &self.inner.definition
    }

    pub fn horizon(&self) -> u64 {
        self.inner.horizon
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn raw(&self, n: u64) -> Result<BigUint, GrowthError> {
        if n > self.inner.horizon {
            return Err(GrowthError::Horizon { n, horizon: self.inner.horizon });
        }
        if let Some(v) = self.inner.memo.read().expect("memo lock").get(&n) {
            return Ok(v.clone());
        }
        let value = match &self.inner.definition {
            Definition::Expr(e) => e.eval(n).map_err(|source| GrowthError::Expr { n, source })?,
            Definition::Table(values) => values[n as usize].clone(),
        };
        // Racing writers compute the same value, so first-insert-wins is fine.
        self.inner.memo.write().expect("memo lock").entry(n).or_insert_with(|| value.clone());
        Ok(value)
    }

    /// Exact value `f(n)` (or `f~(n)` when normalized).
    pub fn eval(&self, n: u64) -> Result<BigUint, GrowthError> {
        if self.normalized {
            if n == 0 {
                return Ok(BigUint::one());
            }
            let floor = BigUint::from(n) * 8u32;
            return Ok(self.raw(n)?.max(floor));
        }
        let v = self.raw(n)?;
        if v.is_zero() {
            return Err(GrowthError::Zero { n });
        }
        Ok(v)
    }

    /// `f~` with `f~(0) = 1` and `f~(n) = max(f(n), 8n)`. Idempotent.
    pub fn normalize(&self) -> Self {
        GrowthFunction { inner: Arc::clone(&self.inner), normalized: true }
    }

    /// Checks monotonicity, `f(n) >= n + 1` and `f(2n) <= f(n)^2` for
    /// `1 <= n <= max_n`. Requires `2 * max_n` within the horizon.
    pub fn validate(&self, max_n: u64) -> Result<ValidationReport, GrowthError> {
        let top = max_n.saturating_mul(2);
        if top > self.horizon() {
            return Err(GrowthError::Horizon { n: top, horizon: self.horizon() });
        }
        let value = |n: u64| -> Result<BigUint, GrowthError> {
            match self.eval(n) {
                Err(GrowthError::Zero { .. }) => Ok(BigUint::zero()),
                other => other,
            }
        };
        let mut report = ValidationReport { monotone_ok: true, lower_bound_ok: true, doubling_ok: true, first_violation: None };
        let note = |report: &mut ValidationReport, property: Property, n: u64, v: &BigUint| {
            if report.first_violation.is_none() {
                report.first_violation = Some(Violation { property, n, value: v.clone() });
            }
        };
        let mut prev = value(1)?;
        for n in 1..=max_n {
            let cur = value(n)?;
            if n > 1 && cur < prev {
                report.monotone_ok = false;
                note(&mut report, Property::Monotone, n, &cur);
            }
            if cur < BigUint::from(n) + 1u32 {
                report.lower_bound_ok = false;
                note(&mut report, Property::LowerBound, n, &cur);
            }
            let doubled = value(2 * n)?;
            if doubled > &cur * &cur {
                report.doubling_ok = false;
                note(&mut report, Property::Doubling, n, &doubled);
            }
            prev = cur;
        }
        Ok(report)
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.inner.definition, self.normalized) {
            (Definition::Expr(e), false) => write!(f, "{e}"),
            (Definition::Expr(e), true) => write!(f, "normalize({e})"),
            (Definition::Table(v), norm) => {
                write!(f, "{}table[0..={}]", if norm { "normalized " } else { "" }, v.len().saturating_sub(1))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Monotone,
    LowerBound,
    Doubling,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Monotone => "monotone",
            Property::LowerBound => "lower_bound",
            Property::Doubling => "doubling",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: Property,
    pub n: u64,
    /// `f(n)` for monotone/lower-bound violations, `f(2n)` for doubling.
    pub value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub monotone_ok: bool,
    pub lower_bound_ok: bool,
    pub doubling_ok: bool,
    pub first_violation: Option<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.monotone_ok && self.lower_bound_ok && self.doubling_ok
    }
}

/// `out[0] = F[0]`, `out[n] = F[n] - F[n-1]`.
pub fn discrete_derivative(values: &[BigUint]) -> Result<Vec<BigUint>, GrowthError> {
    let mut out = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        if i == 0 {
            out.push(v.clone());
        } else if v < &values[i - 1] {
            return Err(GrowthError::Decreasing { index: i });
        } else {
            out.push(v - &values[i - 1]);
        }
    }
    Ok(out)
}

/// Prefix sums: `out[n] = p[0] + ... + p[n]`.
pub fn cumulative(values: &[BigUint]) -> Vec<BigUint> {
    let mut acc = BigUint::zero();
    values
        .iter()
        .map(|v| {
            acc += v;
            acc.clone()
        })
        .collect()
}

/// True iff `f(n) <= c * g(d * n)` at every sample point.
pub fn dominates_with<F, G, E>(mut f: F, mut g: G, c: u64, d: u64, sample: &[u64]) -> Result<bool, E>
where
    F: FnMut(u64) -> Result<BigUint, E>,
    G: FnMut(u64) -> Result<BigUint, E>,
{
    for &n in sample {
        if f(n)? > g(n * d)? * c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f ⪯ g` confirmed at fixed constants on a sample.
pub fn asym_dominates(f: &GrowthFunction, g: &GrowthFunction, c: u64, d: u64, sample: &[u64]) -> Result<bool, GrowthError> {
    dominates_with(|n| f.eval(n), |n| g.eval(n), c, d, sample)
}

/// Points `start, ratio*start, ratio^2*start, ...` up to `max`: a grid whose
/// consecutive ratio is bounded, so domination on the grid transfers to all
/// `n` for non-decreasing functions.
pub fn geometric_grid(start: u64, ratio: u64, max: u64) -> Vec<u64> {
    assert!(start >= 1 && ratio >= 2);
    let mut out = Vec::new();
    let mut n = start;
    while n <= max {
        out.push(n);
        n = match n.checked_mul(ratio) {
            Some(v) => v,
            None => break,
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn f(src: &str) -> GrowthFunction {
        GrowthFunction::parse(src).unwrap()
    }

    #[test]
    fn eval_examples() {
        let quad = f("max(8*n, n^2)");
        assert_eq!(quad.eval(10).unwrap(), big(100));
        assert_eq!(quad.normalize().eval(0).unwrap(), big(1));
        assert_eq!(f("max(8*n, 2^n)").eval(27).unwrap(), big(134_217_728));
    }

    #[test]
    fn zero_values_are_errors() {
        assert_eq!(f("max(8*n, n^2)").eval(0), Err(GrowthError::Zero { n: 0 }));
        assert_eq!(f("n - 5").eval(3), Err(GrowthError::Zero { n: 3 }));
    }

    #[test]
    fn horizon_is_enforced() {
        let g = GrowthFunction::with_horizon(Definition::Expr(Expr::Var), 10);
        assert!(g.eval(10).is_ok());
        assert_eq!(g.eval(11), Err(GrowthError::Horizon { n: 11, horizon: 10 }));
        let t = GrowthFunction::from_table(vec![big(1), big(2)]);
        assert_eq!(t.horizon(), 1);
    }

    #[test]
    fn memo_is_consistent_across_clones() {
        let g = f("3^n + n");
        let h = g.clone();
        for n in 0..50 {
            assert_eq!(g.eval(n).unwrap(), h.eval(n).unwrap());
            assert_eq!(g.eval(n).unwrap(), g.eval(n).unwrap());
        }
    }

    #[test]
    fn validate_linear_passes() {
        let report = f("n+1").validate(1000).unwrap();
        assert!(report.is_ok());
        assert_eq!(report.first_violation, None);
    }

    #[test]
    fn validate_quad_passes() {
        assert!(f("max(8*n, n^2)").validate(4096).unwrap().is_ok());
    }

    #[test]
    fn validate_sqrt_fails_lower_bound() {
        // ceil(sqrt(n)) + 1
        let values = (0..=64u64)
            .map(|n| {
                let mut r = 0u64;
                while r * r < n {
                    r += 1;
                }
                big(r + 1)
            })
            .collect();
        let report = GrowthFunction::from_table(values).validate(32).unwrap();
        assert!(!report.lower_bound_ok);
        // f(4) = 3 < 5, but the first violation is already at n = 3 (3 < 4).
        let v = report.first_violation.unwrap();
        assert_eq!((v.property, v.n, v.value), (Property::LowerBound, 3, big(3)));
    }

    #[test]
    fn validate_counterexample_derivative_is_not_monotone() {
        let values = (0..=12_000).map(counterexample_derivative).collect();
        let report = GrowthFunction::from_table(values).validate(6000).unwrap();
        assert!(!report.monotone_ok);
        assert!(report.lower_bound_ok);
        assert!(report.doubling_ok);
        let v = report.first_violation.unwrap();
        assert_eq!((v.property, v.n, v.value), (Property::Monotone, 5040, big(3_628_800)));
    }

    #[test]
    fn normalize_examples() {
        let lin = f("n+1").normalize();
        assert_eq!(lin.eval(0).unwrap(), big(1));
        for n in 1..200 {
            assert_eq!(lin.eval(n).unwrap(), big(8 * n));
        }
        let quad = f("max(8*n, n^2)");
        let nq = quad.normalize();
        assert_eq!(nq.eval(0).unwrap(), big(1));
        for n in 1..200 {
            assert_eq!(nq.eval(n).unwrap(), quad.eval(n).unwrap());
        }
    }

    #[test]
    fn normalization_preserves_doubling() {
        let lin = f("n+1").normalize();
        for n in 1..=10_000u64 {
            let a = lin.eval(n).unwrap();
            assert!(lin.eval(2 * n).unwrap() <= &a * &a);
        }
        assert!(lin.validate(5000).unwrap().is_ok());
    }

    #[test]
    fn normalize_is_idempotent_and_sandwiched() {
        for src in ["n+1", "max(8*n, n^2)", "n^3 + 2", "2*n + log2(n) + 1"] {
            let g = f(src);
            let once = g.normalize();
            let twice = once.normalize();
            for n in 1..300 {
                let v = once.eval(n).unwrap();
                assert_eq!(v, twice.eval(n).unwrap());
                assert!(g.eval(n).unwrap() <= v);
                assert!(v <= g.eval(8 * n).unwrap(), "{src} at {n}");
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let v = |xs: &[u64]| xs.iter().copied().map(big).collect::<Vec<_>>();
        assert_eq!(discrete_derivative(&v(&[1, 1, 1])).unwrap(), v(&[1, 0, 0]));
        assert_eq!(discrete_derivative(&v(&[1, 25, 61])).unwrap(), v(&[1, 24, 36]));
        assert_eq!(discrete_derivative(&v(&[3, 2])), Err(GrowthError::Decreasing { index: 1 }));
        assert_eq!(cumulative(&v(&[1, 0, 0])), v(&[1, 1, 1]));
        assert_eq!(cumulative(&v(&[1, 24, 36])), v(&[1, 25, 61]));
        assert_eq!(cumulative(&v(&[1, 2, 3, 4])), v(&[1, 3, 6, 10]));
    }

    #[test]
    fn domination_examples() {
        let lin = f("n");
        let sq = f("n^2");
        assert!(asym_dominates(&lin, &sq, 1, 1, &[1, 2, 3, 50, 1000]).unwrap());
        let exp = f("2^n");
        let sample: Vec<u64> = (1..=64).collect();
        assert!(!asym_dominates(&exp, &sq, 8, 8, &sample).unwrap());
        assert!(asym_dominates(&sq, &exp, 1, 1, &[4, 5, 20]).unwrap());
    }

    #[test]
    fn geometric_grid_ratio() {
        assert_eq!(geometric_grid(1, 3, 100), vec![1, 3, 9, 27, 81]);
        assert!(geometric_grid(5, 2, 4).is_empty());
    }

    proptest! {
        #[test]
        fn cumulative_inverts_derivative(xs in proptest::collection::vec(0u64..1_000_000, 0..50)) {
            let seq: Vec<BigUint> = xs.iter().copied().map(big).collect();
            let total = cumulative(&seq);
            prop_assert_eq!(discrete_derivative(&total).unwrap(), seq);
            prop_assert_eq!(cumulative(&discrete_derivative(&total).unwrap()), total);
        }
    }
}
