//! A growth function whose derivative satisfies the pointwise hypotheses
//! (`F'(n) >= n + 1`, `F'(m) <= F'(n)^2` for `m` in `[n, 2n]`) but is not
//! non-decreasing, so `F` is not equivalent to the growth function of any
//! extendable language.
//!
//! `F(0) = 1` and, for `n >= 1`,
//! `F'(n) = (2k+2)!` on `[(2k-1)!, (2k)!)` and `F'(n) = (2k+1)!^2` on `[(2k)!, (2k+1)!)`.

use num_bigint::BigUint;
use num_traits::One;

fn factorial(m: u64) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// `F'(n)`, with `F'(0) = F(0) = 1`.
pub fn counterexample_derivative(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let n_big = BigUint::from(n);
    // Walk m = 1, 2, 3, ... keeping m! until n < (m+1)!; then n lies in [m!, (m+1)!).
    let mut m = 1u64;
    let mut next = BigUint::from(2u32);
    while n_big >= next {
        m += 1;
        next *= m + 1;
    }
    if m % 2 == 1 {
        // m = 2k - 1
        factorial(m + 3)
    } else {
        // m = 2k
        let f = factorial(m + 1);
        &f * &f
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleRow {
    pub n: u64,
    pub value: BigUint,
    pub derivative: BigUint,
}

/// Rows `(n, F(n), F'(n))` for `0 <= n <= max_n`.
pub fn counterexample_table(max_n: u64) -> Vec<CounterexampleRow> {
    let mut rows = Vec::with_capacity(max_n as usize + 1);
    let mut total = BigUint::from(0u32);
    for n in 0..=max_n {
        let derivative = counterexample_derivative(n);
        total += &derivative;
        rows.push(CounterexampleRow { n, value: total.clone(), derivative });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let rows = counterexample_table(2);
        let values: Vec<u64> = rows.iter().map(|r| r.value.clone().try_into().unwrap()).collect();
        assert_eq!(values, vec![1, 25, 61]);
        assert_eq!(counterexample_derivative(1), BigUint::from(24u32));
        assert_eq!(counterexample_derivative(2), BigUint::from(36u32));
        assert_eq!(counterexample_derivative(5), BigUint::from(36u32));
        assert_eq!(counterexample_derivative(6), BigUint::from(720u32));
    }

    #[test]
    fn drop_at_seven_factorial() {
        assert_eq!(counterexample_derivative(5039), BigUint::from(25_401_600u64));
        assert_eq!(counterexample_derivative(5040), BigUint::from(3_628_800u64));
    }

    #[test]
    fn block_boundaries_match_direct_formula() {
        // Independent check: derive the block from explicit factorial bounds.
        let facts: Vec<u64> = (0..=9).map(|m| (1..=m).product()).collect();
        for n in 1..=50_000u64 {
            let m = (1..9).find(|&m| facts[m] <= n && n < facts[m + 1]).unwrap() as u64;
            let expected = if m % 2 == 1 { factorial(m + 3) } else { factorial(m + 1).pow(2) };
            assert_eq!(counterexample_derivative(n), expected, "n = {n}");
        }
    }
}
