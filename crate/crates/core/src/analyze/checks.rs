use num_bigint::BigUint;

use super::ComplexityProfile;
use crate::construct::{visibility_horizon, TraceRecord};
use crate::growth::{GrowthError, GrowthFunction};
use crate::report::{CheckRecord, Report, Verdict};

/// Monotonicity, submultiplicativity and the bounded-or-`n+1` alternative,
/// all within the reliable horizon.
pub fn profile_checks(profile: &ComplexityProfile) -> Report {
    let h = profile.reliable_horizon().min(profile.max_len());
    let p = |n: usize| profile.get(n).expect("within profile");
    let mut report = Report::default();
    let range = format!("n=1..{h}");

    let drop = (1..h).find(|&n| p(n) > p(n + 1));
    report.push(match drop {
        None => CheckRecord::test("monotone", &range, "p(n) <= p(n+1)", "holds", true),
        Some(n) => CheckRecord::test("monotone", format!("n={n}"), "p(n) <= p(n+1)", format!("{} > {}", p(n), p(n + 1)), false),
    });

    report.push(match submultiplicative_violation(profile, h) {
        None => CheckRecord::test("submultiplicative", &range, "p(n+m) <= p(n)p(m)", "holds", true),
        Some((n, m)) => CheckRecord::test(
            "submultiplicative",
            format!("n={n},m={m}"),
            "p(n+m) <= p(n)p(m)",
            format!("{} > {}*{}", p(n + m), p(n), p(m)),
            false,
        ),
    });

    report.push(match (1..=h).find(|&n| p(n) <= n as u64) {
        None => CheckRecord::test("morse-hedlund", &range, "p(n) >= n+1 or bounded", "p(n) >= n+1", true),
        Some(n0) => {
            let bound = p(n0);
            match (n0..=h).find(|&n| p(n) != bound) {
                None => CheckRecord::test(
                    "morse-hedlund",
                    &range,
                    "p(n) >= n+1 or bounded",
                    format!("bounded: p(n)={bound} for n>={n0}"),
                    true,
                ),
                Some(n) => CheckRecord::test(
                    "morse-hedlund",
                    format!("n={n}"),
                    "p(n) >= n+1 or bounded",
                    format!("p({n0})={bound} <= {n0} but p({n})={}", p(n)),
                    false,
                ),
            }
        }
    });
    report
}

/// First `(n, m)`, `n <= m`, `n + m <= h`, with `p(n+m) > p(n)p(m)`.
fn submultiplicative_violation(profile: &ComplexityProfile, h: usize) -> Option<(usize, usize)> {
    let p: Vec<u128> = (0..=h).map(|n| profile.get(n).unwrap_or(0) as u128).collect();
    let max = p.iter().copied().max().unwrap_or(0);
    // suffix_min[m] = min p over [m, h]
    let mut suffix_min = p.clone();
    for m in (1..h).rev() {
        suffix_min[m] = suffix_min[m].min(suffix_min[m + 1]);
    }
    for n in 1..=h / 2 {
        for m in n..=h - n {
            // Every remaining product already reaches the largest value.
            if p[n] * suffix_min[m] >= max {
                break;
            }
            if p[n + m] > p[n] * p[m] {
                return Some((n, m));
            }
        }
    }
    None
}

fn balanced_levels(trace: &[TraceRecord]) -> Vec<&TraceRecord> {
    let mut out: Vec<&TraceRecord> = Vec::new();
    for rec in trace.iter().filter(|r| r.balanced) {
        if out.last().map(|r| r.k) != Some(rec.k) {
            out.push(rec);
        }
    }
    out
}

/// At every balanced `k`: `p(n_k) <= 3 n_k s_k <= (3/2) f(n_k)`, and
/// `p(2 n_k) >= n_k s_k` once the prefix reaches the visibility horizon.
pub fn balanced_bounds_check(
    profile: &ComplexityProfile,
    trace: &[TraceRecord],
    f: &GrowthFunction,
) -> Result<Report, GrowthError> {
    let mut report = Report::default();
    let len = profile.source_length() as u64;
    for rec in balanced_levels(trace) {
        let (k, n) = (rec.k, rec.n);
        let ns: BigUint = &rec.s * n;
        let loc = format!("k={k},n={n}");
        let chain = &ns * 6u32 <= f.eval(n)? * 3u32;
        report.push(CheckRecord::test(
            "balanced-bound-chain",
            &loc,
            "3*n*s <= (3/2)*f(n)",
            format!("3*n*s={}, f(n)={}", &ns * 3u32, f.eval(n)?),
            chain,
        ));
        report.push(match profile.get(n as usize) {
            Some(p) => CheckRecord::test(
                "balanced-upper",
                &loc,
                format!("p(n) <= {}", &ns * 3u32),
                p.to_string(),
                BigUint::from(p) <= &ns * 3u32,
            ),
            None => CheckRecord::new("balanced-upper", &loc, format!("p(n) <= {}", &ns * 3u32), "not measured", Verdict::Skipped),
        });
        let visible = visibility_horizon(trace, k).filter(|&h| h <= len);
        report.push(match (visible, profile.get(2 * n as usize)) {
            (Some(_), Some(p)) => {
                CheckRecord::test("balanced-lower", &loc, format!("p(2n) >= {ns}"), p.to_string(), BigUint::from(p) >= ns)
            }
            (None, _) => {
                let why = match visibility_horizon(trace, k) {
                    Some(h) => format!("prefix {len} < horizon {h}"),
                    None => "horizon level not in trace".to_string(),
                };
                CheckRecord::new("balanced-lower", &loc, format!("p(2n) >= {ns}"), why, Verdict::Skipped)
            }
            (Some(_), None) => {
                CheckRecord::new("balanced-lower", &loc, format!("p(2n) >= {ns}"), "not measured", Verdict::Skipped)
            }
        });
    }
    Ok(report)
}

/// At balanced `n = n_k` within the reliable horizon:
/// `f(⌊n/3⌋) <= 6 p(2n)` (where visible) and `2 p(n) <= 3 f(n)`.
pub fn sandwich_check(profile: &ComplexityProfile, trace: &[TraceRecord], f: &GrowthFunction) -> Result<Report, GrowthError> {
    let mut report = Report::default();
    let len = profile.source_length() as u64;
    let h = profile.reliable_horizon() as u64;
    for rec in balanced_levels(trace) {
        let (k, n) = (rec.k, rec.n);
        if n > h {
            continue;
        }
        let loc = format!("k={k},n={n}");
        let p_n = BigUint::from(profile.get(n as usize).expect("n within horizon"));
        let fn_ = f.eval(n)?;
        report.push(CheckRecord::test(
            "sandwich-upper",
            &loc,
            "2*p(n) <= 3*f(n)",
            format!("p(n)={p_n}, f(n)={fn_}"),
            &p_n * 2u32 <= fn_ * 3u32,
        ));
        let f_third = f.eval(n / 3)?;
        let visible = visibility_horizon(trace, k).is_some_and(|hk| hk <= len);
        report.push(match profile.get(2 * n as usize) {
            Some(p2) if visible && 2 * n <= h => CheckRecord::test(
                "sandwich-lower",
                &loc,
                "f(n/3) <= 6*p(2n)",
                format!("f(n/3)={f_third}, p(2n)={p2}"),
                f_third <= BigUint::from(p2) * 6u32,
            ),
            _ => CheckRecord::new("sandwich-lower", &loc, "f(n/3) <= 6*p(2n)", "not visible in prefix", Verdict::Skipped),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::{complexity_profile, Mode};

    fn periodic(len: usize) -> Vec<u32> {
        (0..len).map(|i| (i % 2) as u32).collect()
    }

    #[test]
    fn periodic_word_is_bounded() {
        let w = periodic(400);
        let profile = complexity_profile(&w, 100, Mode::Fast).unwrap();
        let report = profile_checks(&profile);
        assert!(report.passed(), "{report:?}");
        let mh = report.of("morse-hedlund").next().unwrap();
        assert!(mh.actual.starts_with("bounded: p(n)=2"));
    }

    #[test]
    fn detects_submultiplicative_failure() {
        let profile = ComplexityProfile { p: vec![1, 2, 5, 6, 7, 8, 9, 10, 11], source_length: 32, reliable_horizon: 8 };
        let report = profile_checks(&profile);
        let sub = report.of("submultiplicative").next().unwrap();
        assert_eq!(sub.verdict, Verdict::Fail);
        assert_eq!(sub.location, "n=1,m=1");
    }

    #[test]
    fn pruned_scan_matches_full_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = rng.gen_range(2..40);
            let mut p = vec![1u64];
            let mut v = 1u64;
            for _ in 0..h {
                v += rng.gen_range(0..6);
                p.push(v);
            }
            let profile = ComplexityProfile { p: p.clone(), source_length: 4 * h, reliable_horizon: h };
            let full = (1..=h / 2).flat_map(|n| (n..=h - n).map(move |m| (n, m))).find(|&(n, m)| p[n + m] > p[n] * p[m]);
            assert_eq!(submultiplicative_violation(&profile, h), full);
        }
    }
}
