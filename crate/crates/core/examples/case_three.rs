//! A Case III run: a growth function that flattens out at 3000 forces the
//! level sets to shrink by halving until the index is balanced again.

use subshift::construct::{Case, ConstructionState};
use subshift::growth::GrowthFunction;

fn main() {
    let f = GrowthFunction::parse("max(8*n, min(n^2, 3000))").unwrap().normalize();
    let seed = ConstructionState::from_synthetic_seed(&f, 5, 60, 20).unwrap();
    assert_eq!(seed.classify().unwrap(), Case::III);

    let run = seed.run_case_iii().unwrap();
    for r in run.trace() {
        println!(
            "k={} {:<9} n={:<4} s={:<3} 2ns={:<5} f(n)={}",
            r.k,
            r.case.as_str(),
            r.n,
            r.s,
            &r.s * r.n * 2u32,
            f.eval(r.n).unwrap()
        );
    }
    let last = run.level();
    let first = last.first_word().unwrap();
    println!("first word of the final level has {} symbols, {} nonzero", first.len(), first.iter().filter(|&&s| s != 0).count());
}
