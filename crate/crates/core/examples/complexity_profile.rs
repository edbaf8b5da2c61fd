//! Measures p(n) on a generated prefix with both counting routes and runs
//! the shape checks and the balanced-index bounds.

use subshift::analyze::{balanced_bounds_check, complexity_profile, profile_checks, Mode};
use subshift::construct::ConstructionState;
use subshift::growth::GrowthFunction;

fn main() {
    let f = GrowthFunction::parse("max(8*n, 2^n)").unwrap().normalize();
    let (word, state) = ConstructionState::init(&f).unwrap().omega_prefix(20_000).unwrap();

    let fast = complexity_profile(&word, 5000, Mode::Fast).unwrap();
    let naive = complexity_profile(&word, 5000, Mode::Naive).unwrap();
    assert_eq!(fast, naive);

    for n in [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 4096] {
        println!("p({n}) = {}", fast.get(n).unwrap());
    }
    let report = profile_checks(&fast);
    let bounds = balanced_bounds_check(&fast, state.trace(), &f).unwrap();
    for r in report.records.iter().chain(&bounds.records) {
        println!("{}", r.to_json_line());
    }
}
