//! Writes a word and trace to disk, reads them back, and runs the same
//! checks as `subshift verify`.

use subshift::analyze::Mode;
use subshift::cli::{verify_word, HARD_CHECKS};
use subshift::construct::ConstructionState;
use subshift::growth::GrowthFunction;
use subshift::io::{read_trace, read_word, write_trace, write_word, WordFile};

fn main() {
    let f = GrowthFunction::parse("max(8*n, n^2)").unwrap().normalize();
    let (symbols, state) = ConstructionState::init(&f).unwrap().omega_prefix(50_000).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let (word_path, trace_path) = (dir.path().join("w.ssfw"), dir.path().join("t.jsonl"));
    write_word(&word_path, &WordFile { alphabet: state.alphabet_size().unwrap(), symbols }).unwrap();
    write_trace(&trace_path, state.trace()).unwrap();

    let word = read_word(&word_path).unwrap();
    let trace = read_trace(&trace_path).unwrap();
    let report = verify_word(&f, &word, &trace, 32, Mode::Fast, &[]).unwrap();
    for r in &report.records {
        let hard = if HARD_CHECKS.contains(&r.check.as_str()) { "hard" } else { "soft" };
        println!("{:<7} {hard} {:<22} {:<12} {}", r.verdict, r.check, r.location, r.actual);
    }
}
