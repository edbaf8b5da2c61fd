//! F' satisfies F'(n) >= n+1 and F'(m) <= F'(n)^2 on [n, 2n], yet drops at
//! n = 5040, so F is not the growth function of any extendable language.

use subshift::growth::{counterexample_table, discrete_derivative, GrowthFunction};

fn main() {
    let table = counterexample_table(12_000);
    for n in [0, 1, 2, 5, 6, 23, 24, 119, 120, 719, 720, 5039, 5040] {
        let r = &table[n];
        println!("n={:<5} F={:<16} F'={}", r.n, r.value, r.derivative);
    }

    let values: Vec<_> = table.iter().map(|r| r.value.clone()).collect();
    let d = discrete_derivative(&values).unwrap();
    assert!(d.iter().zip(&table).all(|(a, r)| *a == r.derivative));

    let derivative = GrowthFunction::from_table(table.iter().map(|r| r.derivative.clone()).collect());
    let report = derivative.validate(6000).unwrap();
    println!("F' monotone: {}, first violation: {:?}", report.monotone_ok, report.first_violation.map(|v| v.n));
}
