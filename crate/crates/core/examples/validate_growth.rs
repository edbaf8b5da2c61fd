//! Which growth functions meet the hypotheses, and what normalization does.

use subshift::growth::GrowthFunction;

fn main() {
    for src in ["max(8*n, n^2)", "max(8*n, 2^n)", "n+1", "log2(n)+1", "n^2 - 3*n", "2^(2^n)"] {
        let f = GrowthFunction::parse(src).expect("valid expression");
        match f.validate(32) {
            Ok(report) => {
                let verdict = match &report.first_violation {
                    None => "ok".to_string(),
                    Some(v) => format!("{} fails at n={} (value {})", v.property, v.n, v.value),
                };
                println!("{src:<20} {verdict}");
            }
            Err(e) => println!("{src:<20} {e}"),
        }
    }

    let lin = GrowthFunction::parse("n+1").unwrap().normalize();
    let values: Vec<String> = (0..6).map(|n| lin.eval(n).unwrap().to_string()).collect();
    println!("normalized n+1 at 0..5: {}", values.join(" "));

    match GrowthFunction::parse("max(8*n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("\"max(8*n\": {e}"),
    }
}
