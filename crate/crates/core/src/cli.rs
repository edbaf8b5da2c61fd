//! The `subshift` command line. [`run`] is the whole program; the binary
//! only forwards `argv` and the exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::analyze::{
    self, balanced_bounds_check, complexity_profile, gap_check, profile_checks, recurrence_check, sandwich_check,
};
use crate::construct::{check_trace, ConstructError, ConstructionState};
use crate::growth::{counterexample_table, Definition, Expr, GrowthError, GrowthFunction, DEFAULT_HORIZON};
use crate::io::{self, IoError, WordFile};
use crate::minimal::{build_minimal, MinimalError};
use crate::report::{CheckRecord, Report, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Checks whose failure makes `verify` and `minimal` exit nonzero. The
/// rest (profile shape on a finite prefix, recurrence, lower sandwich,
/// minimal lower bound and window scan) are reported only.
pub const HARD_CHECKS: &[&str] = &[
    "trace-valid",
    "trace-reproduce",
    "word-reproduce",
    "balanced-bound-chain",
    "balanced-upper",
    "balanced-lower",
    "sandwich-upper",
    "gap-reconstruct",
    "gap-blocks",
    "gap-lengths",
    "bound-c",
    "w-size",
    "minimal-upper",
];

#[derive(Debug, Parser)]
#[command(name = "subshift", version, about = "Recurrent and minimal infinite words with prescribed factor complexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check monotonicity, f(n) >= n+1 and f(2n) <= f(n)^2.
    Validate(ValidateArgs),
    /// Write a prefix of the recurrent word and its construction trace.
    Generate(GenerateArgs),
    /// Write the factor complexity profile of a word file as CSV.
    Analyze(AnalyzeArgs),
    /// Rebuild a generated word, compare, and run every check.
    Verify(VerifyArgs),
    /// Build the minimal subshift word and check its bounds.
    Minimal(MinimalArgs),
    /// Tabulate n, F(n), F'(n) for the non-monotone derivative example.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
struct GrowthArgs {
    /// Growth function, e.g. "max(8*n, n^2)".
    #[arg(long = "f", value_name = "EXPR")]
    f: String,
    /// Largest argument f may be evaluated at.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(2..))]
    max_n: u64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    length: u64,
    #[arg(long)]
    word: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// Range for the validation run that gates generation.
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(2..))]
    validate_max_n: u64,
    /// Generate even if validation fails.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Fast,
    Naive,
}

impl From<ModeArg> for analyze::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fast => analyze::Mode::Fast,
            ModeArg::Naive => analyze::Mode::Naive,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    word: PathBuf,
    /// Longest factor length; defaults to a quarter of the word.
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Fast)]
    mode: ModeArg,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write monotone/submultiplicative/Morse–Hedlund records here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckGroup {
    Profile,
    Bounds,
    Sandwich,
    Recurrence,
    Gaps,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    growth: GrowthArgs,
    #[arg(long)]
    word: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    /// JSONL destination; standard output if omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_factor_len: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Fast)]
    mode: ModeArg,
    /// Check groups to leave out.
    #[arg(long, value_enum, value_delimiter = ',')]
    skip: Vec<CheckGroup>,
}

#[derive(Debug, Args)]
struct MinimalArgs {
    #[command(flatten)]
    growth: GrowthArgs,
    /// Number of doubling levels; the word has 2^depth symbols.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..63))]
    depth: u64,
    #[arg(long)]
    word: PathBuf,
    /// JSONL destination; standard output if omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Largest L for the uniform-recurrence scan.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    max_window_len: u64,
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(2..))]
    validate_max_n: u64,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 6000)]
    max_n: u64,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Check(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Resource(_) => EXIT_RESOURCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Check(m) | CliError::Resource(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::Horizon { .. } | GrowthError::Expr { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Resource(_) => CliError::Resource(e.to_string()),
            ConstructError::Growth(g) => g.into(),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<MinimalError> for CliError {
    fn from(e: MinimalError) -> Self {
        match e {
            MinimalError::Resource(_) => CliError::Resource(e.to_string()),
            MinimalError::Growth(g) => g.into(),
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<analyze::AnalyzeError> for CliError {
    fn from(e: analyze::AnalyzeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, dest: Option<&Path>, text: &str) -> Result<(), CliError> {
        match dest {
            Some(path) => io::write_atomic(path, text.as_bytes())?,
            None => self.out.write_all(text.as_bytes()).map_err(|e| CliError::Usage(format!("standard output: {e}")))?,
        }
        Ok(())
    }

    fn note(&mut self, text: &str) {
        let _ = writeln!(self.err, "{text}");
    }
}

/// Runs the program on `args` (including the program name) and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let mut io = Io { out, err };
    let result = match cli.command {
        Command::Validate(a) => validate(a, &mut io),
        Command::Generate(a) => generate(a, &mut io),
        Command::Analyze(a) => analyze_cmd(a, &mut io),
        Command::Verify(a) => verify(a, &mut io),
        Command::Minimal(a) => minimal(a, &mut io),
        Command::Counterexample(a) => counterexample(a, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            io.note(&format!("error: {}", e.message()));
            e.code()
        }
    }
}

fn parse_growth(args: &GrowthArgs) -> Result<GrowthFunction, CliError> {
    let expr = Expr::parse(&args.f).map_err(|e| CliError::Usage(format!("--f {:?}: {e}", args.f)))?;
    Ok(GrowthFunction::with_horizon(Definition::Expr(expr), args.horizon))
}

fn distinct(paths: &[&Path]) -> Result<(), CliError> {
    for (i, a) in paths.iter().enumerate() {
        if paths[i + 1..].contains(a) {
            return Err(CliError::Usage(format!("output path {} is given twice", a.display())));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ViolationLine {
    property: String,
    n: String,
    value: String,
}

// Field order here is the output order.
#[derive(Serialize)]
struct ValidationLine {
    f: String,
    max_n: String,
    monotone_ok: bool,
    lower_bound_ok: bool,
    doubling_ok: bool,
    first_violation: Option<ViolationLine>,
}

fn validation_json(f: &GrowthFunction, max_n: u64) -> Result<(bool, String), CliError> {
    let report = f.validate(max_n)?;
    let line = ValidationLine {
        f: f.to_string(),
        max_n: max_n.to_string(),
        monotone_ok: report.monotone_ok,
        lower_bound_ok: report.lower_bound_ok,
        doubling_ok: report.doubling_ok,
        first_violation: report.first_violation.as_ref().map(|v| ViolationLine {
            property: v.property.to_string(),
            n: v.n.to_string(),
            value: v.value.to_string(),
        }),
    };
    Ok((report.is_ok(), serde_json::to_string(&line).expect("validation line serializes")))
}

fn validate(a: ValidateArgs, io: &mut Io) -> Result<i32, CliError> {
    let f = parse_growth(&a.growth)?;
    let (ok, line) = validation_json(&f, a.max_n)?;
    io.emit(None, &(line + "\n"))?;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

fn gate(f: &GrowthFunction, max_n: u64, force: bool, io: &mut Io) -> Result<(), CliError> {
    let (ok, line) = validation_json(f, max_n)?;
    if ok {
        return Ok(());
    }
    if force {
        io.note(&format!("warning: validation failed, continuing because of --force: {line}"));
        return Ok(());
    }
    Err(CliError::Check(format!("validation failed: {line}; pass --force to continue anyway")))
}

fn generate(a: GenerateArgs, io: &mut Io) -> Result<i32, CliError> {
    distinct(&[&a.word, &a.trace])?;
    let raw = parse_growth(&a.growth)?;
    gate(&raw, a.validate_max_n, a.force, io)?;
    let f = raw.normalize();
    let (symbols, state) = ConstructionState::init(&f)?.omega_prefix(a.length)?;
    let word = WordFile { alphabet: state.alphabet_size()?, symbols };
    io::write_word(&a.word, &word)?;
    io::write_trace(&a.trace, state.trace())?;
    io.note(&format!(
        "wrote {} symbols over {} letters; {} trace records up to k={}, n={}",
        word.symbols.len(),
        word.alphabet,
        state.trace().len(),
        state.k(),
        state.n()
    ));
    Ok(EXIT_OK)
}

fn analyze_cmd(a: AnalyzeArgs, io: &mut Io) -> Result<i32, CliError> {
    let paths: Vec<&Path> = [a.out.as_deref(), a.report.as_deref()].into_iter().flatten().collect();
    distinct(&paths)?;
    let word = io::read_word(&a.word)?;
    let max_len = a.max_len.unwrap_or(word.symbols.len() / 4);
    let profile = complexity_profile(&word.symbols, max_len, a.mode.into())?;
    io.emit(a.out.as_deref(), &profile.to_csv())?;
    if let Some(path) = &a.report {
        io::write_atomic(path, profile_checks(&profile).to_jsonl().as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn hard_failures(report: &Report) -> usize {
    report.failures().filter(|r| HARD_CHECKS.contains(&r.check.as_str())).count()
}

fn summarize(report: &Report, io: &mut Io) -> i32 {
    let hard = hard_failures(report);
    io.note(&format!(
        "{} checks: {} pass, {} fail ({hard} hard), {} skipped",
        report.records.len(),
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Skipped)
    ));
    for r in report.failures() {
        io.note(&format!("  fail {} at {}: expected {}, got {}", r.check, r.location, r.expected, r.actual));
    }
    if hard == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK
    }
}

/// Everything `verify` runs, on an already loaded word and trace.
pub fn verify_word(
    f: &GrowthFunction,
    word: &WordFile,
    trace: &[crate::construct::TraceRecord],
    max_factor_len: usize,
    mode: analyze::Mode,
    skip: &[&str],
) -> Result<Report, VerifyError> {
    let mut report = Report::default();
    let issues = check_trace(f, trace)?;
    if issues.is_empty() {
        report.push(CheckRecord::test(
            "trace-valid",
            "all",
            "transitions, growth and balance hold",
            format!("{} records", trace.len()),
            true,
        ));
    }
    for issue in &issues {
        report.push(CheckRecord::test(
            "trace-valid",
            format!("record {}", issue.index),
            "transitions, growth and balance hold",
            &issue.message,
            false,
        ));
    }

    let len = word.symbols.len() as u64;
    let (rebuilt, state) = ConstructionState::init(f)?.omega_prefix(len)?;
    let first_diff = state.trace().iter().zip(trace).position(|(a, b)| a != b);
    let same_trace = first_diff.is_none() && state.trace().len() == trace.len();
    report.push(CheckRecord::test(
        "trace-reproduce",
        match first_diff {
            Some(i) => format!("record {i}"),
            None => "all".to_string(),
        },
        format!("{} records as rebuilt", state.trace().len()),
        format!("{} records in file", trace.len()),
        same_trace,
    ));
    let alphabet = state.alphabet_size()?;
    let word_diff = rebuilt.iter().zip(&word.symbols).position(|(a, b)| a != b);
    report.push(CheckRecord::test(
        "word-reproduce",
        match word_diff {
            Some(i) => format!("symbol {i}"),
            None => format!("len={len}"),
        },
        format!("rebuilt word, alphabet {alphabet}"),
        format!("alphabet {}", word.alphabet),
        word_diff.is_none() && word.alphabet == alphabet && rebuilt.len() == word.symbols.len(),
    ));

    let symbols = &word.symbols;
    let profile = complexity_profile(symbols, symbols.len() / 4, mode)?;
    if !skip.contains(&"profile") {
        report.extend(profile_checks(&profile));
    }
    if !skip.contains(&"bounds") {
        report.extend(balanced_bounds_check(&profile, trace, f)?);
    }
    if !skip.contains(&"sandwich") {
        report.extend(sandwich_check(&profile, trace, f)?);
    }
    if !skip.contains(&"recurrence") {
        if symbols.len() >= 4 * max_factor_len {
            report.push(recurrence_check(symbols, max_factor_len).record());
        } else {
            report.push(CheckRecord::new(
                "recurrence",
                format!("len<={max_factor_len}"),
                "every factor starting in the first quarter occurs again later",
                format!("word of length {} is shorter than 4*{max_factor_len}", symbols.len()),
                Verdict::Skipped,
            ));
        }
    }
    if !skip.contains(&"gaps") {
        let mut seen = Vec::new();
        for rec in trace.iter().filter(|r| r.balanced && r.n <= len / 4) {
            if seen.contains(&rec.k) {
                continue;
            }
            seen.push(rec.k);
            if let Some(level) = state.level_at(rec.k) {
                report.extend(gap_check(symbols, level));
            }
        }
    }
    Ok(report)
}

/// Failure to run the verifier at all, as opposed to a failed check.
#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Analyze(#[from] analyze::AnalyzeError),
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Growth(g) => g.into(),
            VerifyError::Construct(c) => c.into(),
            VerifyError::Analyze(a) => a.into(),
        }
    }
}

fn verify(a: VerifyArgs, io: &mut Io) -> Result<i32, CliError> {
    let f = parse_growth(&a.growth)?.normalize();
    let word = io::read_word(&a.word)?;
    let trace = io::read_trace(&a.trace)?;
    let skip: Vec<&str> = a
        .skip
        .iter()
        .map(|g| match g {
            CheckGroup::Profile => "profile",
            CheckGroup::Bounds => "bounds",
            CheckGroup::Sandwich => "sandwich",
            CheckGroup::Recurrence => "recurrence",
            CheckGroup::Gaps => "gaps",
        })
        .collect();
    let report = verify_word(&f, &word, &trace, a.max_factor_len as usize, a.mode.into(), &skip)?;
    io.emit(a.report.as_deref(), &report.to_jsonl())?;
    Ok(summarize(&report, io))
}

fn minimal(a: MinimalArgs, io: &mut Io) -> Result<i32, CliError> {
    if let Some(r) = &a.report {
        distinct(&[&a.word, r])?;
    }
    let raw = parse_growth(&a.growth)?;
    gate(&raw, a.validate_max_n, a.force, io)?;
    let f = raw.normalize();
    let state = build_minimal(&f, a.depth)?;
    let symbols = state.emitted()?;
    let profile = complexity_profile(&symbols, symbols.len() / 4, analyze::Mode::Fast)?;
    let report = state.checks(&symbols, &profile, a.max_window_len as usize)?;
    let alphabet =
        state.b().to_u32().ok_or_else(|| CliError::Resource(format!("alphabet size {} does not fit 32 bits", state.b())))?;
    io::write_word(&a.word, &WordFile { alphabet, symbols })?;
    io.emit(a.report.as_deref(), &report.to_jsonl())?;
    Ok(summarize(&report, io))
}

fn counterexample(a: CounterexampleArgs, io: &mut Io) -> Result<i32, CliError> {
    let mut csv = String::from("n,F,F_prime\n");
    for row in counterexample_table(a.max_n) {
        csv.push_str(&format!("{},{},{}\n", row.n, row.value, row.derivative));
    }
    io.emit(a.out.as_deref(), &csv)?;
    Ok(EXIT_OK)
}
