//! Builds the minimal subshift word for f(n) = max(8n, n^2) and prints the
//! c-sequence, the absorption choices and the report.

use subshift::analyze::{complexity_profile, Mode};
use subshift::growth::GrowthFunction;
use subshift::minimal::{build_minimal, find_mu, Choice};

fn main() {
    let f = GrowthFunction::parse("max(8*n, n^2)").unwrap().normalize();
    let state = build_minimal(&f, 14).unwrap();

    let c: Vec<String> = state.c().iter().map(|c| c.to_string()).collect();
    println!("b = {}, c = {}", state.b(), c.join(" "));
    println!("mu(3) = {}", find_mu(&f, 3, 20).unwrap());
    for (n, choice) in state.choices().iter().enumerate() {
        match choice {
            Choice::Absorbed { p, index } => println!("level {n}: absorbed word {index} of W(2^{p})"),
            Choice::Default => println!("level {n}: first c of W(2^{n})"),
        }
    }

    let word = state.emitted().unwrap();
    let profile = complexity_profile(&word, word.len() / 4, Mode::Fast).unwrap();
    for r in state.checks(&word, &profile, 8).unwrap().records {
        println!("{}", r.to_json_line());
    }
}
