//! Runs the construction for f(n) = max(8n, n^2) and prints the trace and
//! the start of the limit word.

use subshift::construct::ConstructionState;
use subshift::growth::GrowthFunction;

fn main() {
    let f = GrowthFunction::parse("max(8*n, n^2)").unwrap().normalize();
    let (word, state) = ConstructionState::init(&f).unwrap().omega_prefix(2000).unwrap();

    println!("{:>3} {:>9} {:>6} {:>8} {:>6}  balanced", "k", "case", "n", "s", "g");
    for r in state.trace() {
        println!("{:>3} {:>9} {:>6} {:>8} {:>6}  {}", r.k, r.case.as_str(), r.n, r.s, r.g, r.balanced);
    }

    let head: String = word[..80].iter().map(|s| char::from_digit(*s, 10).unwrap_or('?')).collect();
    println!("omega = {head}...");
    for (k, level) in state.levels().iter().take(3).enumerate() {
        let members: Vec<String> = level.members().unwrap().iter().map(|w| w.iter().map(|s| s.to_string()).collect()).collect();
        println!("X_{} = {{{}}}", k + 1, members.join(", "));
    }
}
