use num_traits::ToPrimitive;
use proptest::prelude::*;

use subshift::analyze::Mode;
use subshift::cli::{verify_word, HARD_CHECKS};
use subshift::construct::{check_trace, ConstructionState};
use subshift::growth::GrowthFunction;
use subshift::io::WordFile;

const FAMILY: &[&str] = &[
    "max(8*n, n^2)",
    "max(8*n, 2^n)",
    "n+1",
    "max(8*n, min(n^2, 3000))",
    "n^2+n",
    "max(8*n, n^3)",
    "n*log2(n+1)+1",
    "max(9*n, min(2^n, 40*n*n))",
];

fn f(i: usize) -> GrowthFunction {
    GrowthFunction::parse(FAMILY[i]).unwrap().normalize()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_words_verify(i in 0..FAMILY.len(), len in 1u64..6000) {
        let f = f(i);
        let (symbols, state) = ConstructionState::init(&f).unwrap().omega_prefix(len).unwrap();
        let word = WordFile { alphabet: state.alphabet_size().unwrap(), symbols };
        let report = verify_word(&f, &word, state.trace(), 16, Mode::Fast, &[]).unwrap();
        let hard: Vec<_> = report.failures().filter(|r| HARD_CHECKS.contains(&r.check.as_str())).collect();
        prop_assert!(hard.is_empty(), "{}: {:?}", FAMILY[i], hard);
    }

    #[test]
    fn prefixes_nest(i in 0..FAMILY.len(), a in 1u64..3000, b in 1u64..3000) {
        let f = f(i);
        let init = ConstructionState::init(&f).unwrap();
        let (short, long) = (a.min(b), a.max(b));
        let (x, _) = init.omega_prefix(short).unwrap();
        let (y, _) = init.omega_prefix(long).unwrap();
        prop_assert_eq!(&y[..short as usize], &x[..]);
    }

    #[test]
    fn level_members_are_well_formed(i in 0..FAMILY.len(), depth in 1u64..8, picks in prop::collection::vec(any::<u64>(), 1..12)) {
        let f = f(i);
        let mut state = ConstructionState::init(&f).unwrap();
        for _ in 0..depth {
            state = state.advance().unwrap();
        }
        prop_assert!(check_trace(&f, state.trace()).unwrap().is_empty());
        for level in state.levels() {
            let size = level.size().to_u64().unwrap_or(u64::MAX);
            let first = level.first_word().unwrap();
            for &p in &picks {
                let idx = p % size;
                let w = level.word(idx).unwrap();
                prop_assert_eq!(w.len() as u64, level.len());
                prop_assert!(w[0] != 0 && *w.last().unwrap() != 0);
                prop_assert_eq!(level.index_of(&w), Some(idx));
                if idx != 0 {
                    prop_assert_ne!(&w, &first);
                }
            }
        }
        for pair in state.levels().windows(2) {
            let (a, b) = (pair[0].first_word().unwrap(), pair[1].first_word().unwrap());
            prop_assert_eq!(&b[..a.len()], &a[..]);
        }
    }
}
