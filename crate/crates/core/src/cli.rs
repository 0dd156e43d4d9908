//! Command-line front end. Exit codes: 0 success, 1 usage or domain error,
//! 2 when a bound that holds for every convex set appeared violated.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::construct::{construct, glue, ConstructError};
use crate::convex::ConvexSet;
use crate::io::{read_set_file, set_to_json, to_json, write_text, FileError};
use crate::oracle::{search, verify_bound, OracleError, SearchOptions};
use crate::rational::Rational;
use crate::report::{ratio_decimal, recheck, write_report, ReportError};
use crate::stats::{diff_stats, max_rep_sum_of};

#[derive(Debug, Parser)]
#[command(
    name = "convex-diff",
    version,
    about = "Rich differences in convex sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a set of size 2m with a difference represented m times.
    Construct(ConstructArgs),
    /// Glue rescaled copies of the construction end to end.
    Glue(GlueArgs),
    /// Representation statistics of a set file.
    Analyze(AnalyzeArgs),
    /// Check r(d) <= floor(n/2) on a set file and list witnesses.
    Verify(VerifyArgs),
    /// Exhaustive check over integer convex sets with bounded gaps.
    Search(SearchArgs),
    /// Scaling table over the construction family.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the main output here instead of standard output.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(long)]
    m: u64,
    /// Perturbation, "p/q" or "p"; defaults to 1 for m <= 2 and 1/(2(m-1)) otherwise.
    #[arg(long, value_parser = parse_rational)]
    delta: Option<Rational>,
    /// Dilate to integers before writing.
    #[arg(long)]
    integer: bool,
    /// Metadata file (default: <output>.meta.json when -o is given, else stderr).
    #[arg(long)]
    meta: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GlueArgs {
    #[arg(long)]
    t: u64,
    #[arg(long)]
    copies: u64,
    #[arg(long)]
    integer: bool,
    #[arg(long)]
    meta: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Rich-difference thresholds (repeat or comma-separate).
    #[arg(long = "hist", value_delimiter = ',')]
    hist: Vec<u64>,
    #[arg(long)]
    energy: bool,
    #[arg(long = "max-rep")]
    max_rep: bool,
    #[arg(long = "sum-rep")]
    sum_rep: bool,
    /// Write the full difference histogram as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    file: PathBuf,
    /// List witnesses for this difference instead of the most popular one.
    #[arg(long, value_parser = parse_rational)]
    d: Option<Rational>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "max-gap")]
    max_gap: u64,
    /// Include the first gap sequence reaching the maximum.
    #[arg(long)]
    attain: bool,
    /// Single-threaded enumeration.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(
        long = "m-list",
        value_delimiter = ',',
        required_unless_present = "recheck"
    )]
    m_list: Vec<u64>,
    /// CSV path; a sibling .json index and a <stem>_sets/ directory are written too.
    #[arg(long, required_unless_present = "recheck")]
    out: Option<PathBuf>,
    /// Re-derive every raw column of an existing report from its set files.
    #[arg(long, conflicts_with_all = ["m_list", "out"])]
    recheck: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Construct(Box<ConstructError>),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Report(Box<ReportError>),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Invariant(String),
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        CliError::Construct(Box::new(e))
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Report(Box::new(e))
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Oracle(e) if e.is_invariant_violation() => 2,
            CliError::Invariant(_) => 2,
            _ => 1,
        }
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
        match output {
            Some(path) => write_text(path, text)?,
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Domain(format!("writing output: {e}")))?,
        }
        Ok(())
    }

    fn note(&mut self, text: &str) {
        let _ = self.stderr.write_all(text.as_bytes());
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let label = if code == 2 {
                "internal invariant violated"
            } else {
                "error"
            };
            io.note(&format!("{label}: {e}\n"));
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<(), CliError> {
    match command {
        Command::Construct(args) => cmd_construct(args, io),
        Command::Glue(args) => cmd_glue(args, io),
        Command::Analyze(args) => cmd_analyze(args, io),
        Command::Verify(args) => cmd_verify(args, io),
        Command::Search(args) => cmd_search(args, io),
        Command::Report(args) => cmd_report(args, io),
    }
}

fn scale_number(l: &BigUint) -> Result<u64, CliError> {
    l.to_u64()
        .ok_or_else(|| CliError::Domain(format!("dilation factor {l} does not fit in 64 bits")))
}

fn meta_path(meta: &Option<PathBuf>, output: &Option<PathBuf>) -> Option<PathBuf> {
    meta.clone().or_else(|| {
        output.as_ref().map(|p| {
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            p.with_file_name(format!("{stem}.meta.json"))
        })
    })
}

/// Writes the set, then the metadata to its file or, failing that, stderr.
fn write_set_and_meta<M: Serialize>(
    io: &mut Io<'_>,
    set: &ConvexSet,
    meta: &M,
    meta_file: &Option<PathBuf>,
    output: &Option<PathBuf>,
) -> Result<(), CliError> {
    io.emit(output, &set_to_json(set))?;
    let meta_text = to_json(meta);
    match meta_path(meta_file, output) {
        Some(path) => {
            write_text(&path, &meta_text)?;
            if output.is_some() {
                io.emit(&None, &meta_text)?;
            }
        }
        None => io.note(&meta_text),
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstructMeta {
    m: u64,
    delta: Rational,
    d: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<u64>,
}

fn cmd_construct(args: ConstructArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let built = construct(args.m, args.delta)?;
    let (set, d, scale) = if args.integer {
        let (set, l) = built.set.dilate_to_integers();
        let d = &built.d * &Rational::from(l.clone());
        (set, d, Some(scale_number(&l)?))
    } else {
        (built.set, built.d, None)
    };
    let meta = ConstructMeta {
        m: built.m,
        delta: built.delta,
        d,
        scale,
    };
    write_set_and_meta(io, &set, &meta, &args.meta, &args.out.output)
}

#[derive(Serialize)]
struct GlueMeta {
    t: u64,
    copies: u64,
    delta: Rational,
    copy_scales: Vec<u64>,
    rich_differences: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<u64>,
}

fn cmd_glue(args: GlueArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let glued = glue(args.t, args.copies)?;
    let (set, rich, scale) = if args.integer {
        let (set, l) = glued.set.dilate_to_integers();
        let factor = Rational::from(l.clone());
        let rich = glued.rich_differences.iter().map(|d| d * &factor).collect();
        (set, rich, Some(scale_number(&l)?))
    } else {
        (glued.set, glued.rich_differences, None)
    };
    let meta = GlueMeta {
        t: glued.t,
        copies: glued.copies,
        delta: glued.delta,
        copy_scales: glued.scales,
        rich_differences: rich,
        scale,
    };
    write_set_and_meta(io, &set, &meta, &args.meta, &args.out.output)
}

#[derive(Serialize)]
struct RepAt {
    d: Rational,
    count: u64,
}

#[derive(Serialize)]
struct SumAt {
    c: Rational,
    count: u64,
}

#[derive(Serialize)]
struct RichOut {
    t: u64,
    count: u64,
    /// count * t^3 / n^3
    ratio: String,
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<String>,
    diff_set_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_rep: Option<RepAt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_sum_rep: Option<SumAt>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rich_counts: Vec<RichOut>,
}

fn cmd_analyze(args: AnalyzeArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let set = read_set_file(&args.file)?;
    let stats = diff_stats(&set);
    let everything = !(args.energy || args.max_rep || args.sum_rep || !args.hist.is_empty());
    let bound = set.len() as u64 / 2;

    let max_rep = if (everything || args.max_rep) && set.len() >= 2 {
        let (d, count) = stats
            .max_rep()
            .map_err(|e| CliError::Domain(e.to_string()))?;
        if count > bound {
            return Err(CliError::Invariant(format!(
                "r({d}) = {count} exceeds floor(n/2) = {bound}"
            )));
        }
        Some(RepAt { d, count })
    } else {
        None
    };
    let max_sum_rep = if everything || args.sum_rep {
        max_rep_sum_of(set.elements()).map(|(c, count)| SumAt { c, count })
    } else {
        None
    };
    let mut rich_counts = Vec::new();
    for &t in &args.hist {
        let count = stats
            .rich_count(t)
            .map_err(|e| CliError::Domain(e.to_string()))?;
        let scaled = BigUint::from(count) * BigUint::from(t).pow(3);
        rich_counts.push(RichOut {
            t,
            count,
            ratio: ratio_decimal(&scaled, set.len() as u64, 3, 1),
        });
    }
    let report = AnalyzeReport {
        n: set.len(),
        energy: (everything || args.energy).then(|| stats.energy.to_string()),
        diff_set_size: stats.diff_set_size,
        max_rep,
        max_sum_rep,
        rich_counts,
    };
    if let Some(path) = &args.csv {
        let mut csv = String::from("difference,count\n");
        for (d, c) in &stats.rep_counts {
            csv.push_str(&format!("{d},{c}\n"));
        }
        write_text(path, &csv)?;
    }
    io.emit(&args.out.output, &to_json(&report))
}

fn cmd_verify(args: VerifyArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let set = read_set_file(&args.file)?;
    if args.d.as_ref().is_some_and(Rational::is_zero) {
        return Err(OracleError::ZeroDifference.into());
    }
    let report = verify_bound(&set, args.d.as_ref())?;
    io.emit(&args.out.output, &to_json(&report))
}

fn cmd_search(args: SearchArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let opts = SearchOptions {
        attain: args.attain,
        parallel: !args.sequential,
    };
    let report = search(args.n, args.max_gap, opts)?;
    io.emit(&args.out.output, &to_json(&report))?;
    if !report.is_clean() {
        return Err(CliError::Invariant(format!(
            "{} bound violations, {} witness-structure failures, {} of {} sets visited",
            report.violations.len(),
            report.structure_failures.len(),
            report.sets_enumerated,
            report.expected_sets
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportSummary {
    csv: String,
    json: String,
    set_dir: String,
    rows: usize,
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn cmd_report(args: ReportArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    if let Some(json) = &args.recheck {
        let outcome = recheck(json)?;
        io.emit(&args.output.output, &to_json(&outcome))?;
        if !outcome.ok {
            let bad: Vec<String> = outcome
                .rows
                .iter()
                .filter(|r| !r.ok)
                .map(|r| format!("m={}", r.m))
                .collect();
            return Err(CliError::Domain(format!(
                "recheck failed for {}",
                bad.join(", ")
            )));
        }
        return Ok(());
    }
    let out = args.out.expect("clap enforces --out");
    let written = write_report(&args.m_list, &out)?;
    let summary = ReportSummary {
        csv: display(&written.csv),
        json: display(&written.json),
        set_dir: display(&written.set_dir),
        rows: written.index.rows.len(),
    };
    io.emit(&args.output.output, &to_json(&summary))
}
