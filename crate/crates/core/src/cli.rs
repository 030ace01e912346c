//! The `rankdrift` command line.
//!
//! Exit codes: 0 on success, 1 when input data fails validation, 2 for
//! usage and selection errors (bad flags, unreadable files, empty
//! selections, no common dates).

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::longitudinal::{
    cross_series, round_diff, round_stats, self_series, summarize, trajectory, AnalysisError,
};
use crate::measures::{compare, TopKList};
use crate::report::{
    emit_pairwise_table, emit_round_table, emit_rounds_diff_table, emit_trajectory_csv, DiffRow,
    PairRow, Rendered, RoundRow,
};
use crate::snapshot::{
    load_store_with, select_period, LoadOptions, ObservationPeriod, PeriodError, SnapshotStore,
    StoreError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rankdrift", version, about = "Compare top-k rankings and track how they drift over time")]
struct Cli {
    /// TOML file with defaults for `store`, `k` and `normalize_host`
    #[arg(short = 'c', long, global = true)]
    config: Option<PathBuf>,

    /// Snapshot file (JSON Lines, or CSV with a .csv extension)
    #[arg(short = 's', long, global = true, env = "RANKDRIFT_STORE")]
    store: Option<PathBuf>,

    /// List cutoff [default: 10]
    #[arg(short = 'k', long, global = true)]
    k: Option<usize>,

    /// Lowercase URL scheme and host on ingest
    #[arg(short = 'n', long, global = true)]
    normalize_host: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a snapshot file and report warnings
    Validate,
    /// Compare two ranked lists
    Compare(CompareArgs),
    /// Self-similarity of engines over consecutive snapshots
    Timeseries(SelectArgs),
    /// Same-day comparison between engines
    Cross(SelectArgs),
    /// Drift in average rank between two rounds
    RoundsDiff(RoundsArgs),
    /// Export an item-by-date rank matrix as CSV
    Trajectory(TrajectoryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// File with one item per line, best first
    #[arg(short = 'a', long, conflicts_with = "items_a", required_unless_present = "items_a")]
    file_a: Option<PathBuf>,
    #[arg(short = 'b', long, conflicts_with = "items_b", required_unless_present = "items_b")]
    file_b: Option<PathBuf>,
    /// Comma-separated items, best first
    #[arg(long, value_delimiter = ',')]
    items_a: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    items_b: Option<Vec<String>>,
    #[arg(short = 'f', long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Engine to include; repeat for several
    #[arg(short = 'e', long = "engine", required = true)]
    engines: Vec<String>,
    #[arg(short = 'q', long)]
    query: String,
    /// Inclusive date range, FROM..TO
    #[arg(short = 'r', long)]
    range: Option<DateRange>,
    #[arg(short = 'f', long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct RoundsArgs {
    #[arg(short = 'e', long = "engine", required = true)]
    engines: Vec<String>,
    #[arg(short = 'q', long)]
    query: String,
    /// First round, FROM..TO
    #[arg(long)]
    round1: DateRange,
    /// Second round, FROM..TO
    #[arg(long)]
    round2: DateRange,
    #[arg(short = 'f', long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct TrajectoryArgs {
    #[arg(short = 'e', long)]
    engine: String,
    #[arg(short = 'q', long)]
    query: String,
    #[arg(short = 'r', long)]
    range: Option<DateRange>,
    /// Output file; standard output when omitted
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

/// Inclusive `FROM..TO` date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateRange {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateRange {
    pub const ALL: DateRange = DateRange {
        from: NaiveDate::MIN,
        to: NaiveDate::MAX,
    };

    fn overlaps(&self, other: &DateRange) -> bool {
        self.from <= other.to && other.from <= self.to
    }
}

impl FromStr for DateRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s
            .split_once("..")
            .ok_or_else(|| format!("expected FROM..TO, got {s:?}"))?;
        let parse = |d: &str| {
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
                .map_err(|e| format!("bad date {d:?}: {e}"))
        };
        Ok(DateRange {
            from: parse(from)?,
            to: parse(to)?,
        })
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.from, self.to)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    store: Option<PathBuf>,
    k: Option<usize>,
    normalize_host: Option<bool>,
}

/// Settings after merging the optional config file with flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub store_path: Option<PathBuf>,
    pub k: usize,
    pub normalize_host: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) => m,
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        if e.is_validation() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn io_error(context: &str, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{context}: {e}"))
}

fn resolve_config(cli: &Cli) -> Result<CliConfig, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| io_error(&format!("cannot read {}", path.display()), e))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let k = cli.k.or(file.k).unwrap_or(10);
    if k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    Ok(CliConfig {
        store_path: cli.store.clone().or(file.store),
        k,
        normalize_host: cli.normalize_host || file.normalize_host.unwrap_or(false),
    })
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> Result<(), CliError> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| io_error("cannot write output", e))
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }
}

fn load(config: &CliConfig, io: &mut Io<'_>) -> Result<SnapshotStore, CliError> {
    let path = config.store_path.as_deref().ok_or_else(|| {
        CliError::Usage("no snapshot store given (use --store or RANKDRIFT_STORE)".into())
    })?;
    let opts = LoadOptions {
        k: config.k,
        normalize_host: config.normalize_host,
    };
    let (store, warnings) = load_store_with(path, &opts)?;
    for w in &warnings {
        io.warn(&w.to_string());
    }
    Ok(store)
}

fn emit(io: &mut Io<'_>, rendered: Rendered, format: Format) -> Result<(), CliError> {
    match format {
        Format::Table => io.print(&rendered.text),
        Format::Csv => io.print(&rendered.csv),
    }
}

fn period(
    store: &SnapshotStore,
    engine: &str,
    query: &str,
    range: DateRange,
    label: &str,
) -> Result<ObservationPeriod, CliError> {
    Ok(select_period(store, engine, query, range.from, range.to, label)?)
}

fn read_list_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| io_error(&format!("cannot read {}", path.display()), e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn list_arg(
    file: &Option<PathBuf>,
    items: &Option<Vec<String>>,
    side: &str,
    k: usize,
) -> Result<TopKList, CliError> {
    let items = match (file, items) {
        (Some(path), _) => read_list_file(path)?,
        (None, Some(items)) => items.iter().map(|s| s.trim().to_owned()).collect(),
        (None, None) => return Err(CliError::Usage(format!("list {side} is missing"))),
    };
    TopKList::new(k, items).map_err(|e| CliError::Invalid(format!("list {side}: {e}")))
}

fn cmd_validate(config: &CliConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    let store = load(config, io)?;
    io.print(&format!("ok: {} snapshot(s)\n", store.len()))
}

fn cmd_compare(args: &CompareArgs, config: &CliConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    let a = list_arg(&args.file_a, &args.items_a, "a", config.k)?;
    let b = list_arg(&args.file_b, &args.items_b, "b", config.k)?;
    let result = compare(&a, &b).expect("both lists use the configured k");
    match args.format {
        Format::Table => io.print(&format!("{result}\n")),
        Format::Csv => {
            let f = result.f.map_or_else(|| "N/A".to_owned(), |v| v.to_string());
            io.print(&format!(
                "overlap,F,G,M\n{},{},{},{}\n",
                result.overlap, f, result.g, result.m
            ))
        }
    }
}

fn cmd_timeseries(args: &SelectArgs, config: &CliConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    let store = load(config, io)?;
    let range = args.range.unwrap_or(DateRange::ALL);
    let mut rows = Vec::new();
    for engine in &args.engines {
        let p = period(&store, engine, &args.query, range, "period")?;
        let series = self_series(&p)?;
        let gaps = series.iter().filter(|e| e.gap).count();
        if gaps > 0 {
            io.warn(&format!(
                "{engine}: {gaps} comparison(s) span missing days"
            ));
        }
        rows.push(RoundRow {
            engine: engine.clone(),
            summary: summarize(&series)?,
            stats: round_stats(&p),
        });
    }
    emit(io, emit_round_table(&rows), args.format)
}

fn cmd_cross(args: &SelectArgs, config: &CliConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    if args.engines.len() < 2 {
        return Err(CliError::Usage("cross needs at least two --engine values".into()));
    }
    let store = load(config, io)?;
    let range = args.range.unwrap_or(DateRange::ALL);
    let periods = args
        .engines
        .iter()
        .map(|e| period(&store, e, &args.query, range, "period"))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (i, a) in periods.iter().enumerate() {
        for b in &periods[i + 1..] {
            let series = cross_series(a, b)?;
            rows.push(PairRow {
                engine_a: a.engine().to_owned(),
                engine_b: b.engine().to_owned(),
                summary: summarize(&series)?,
            });
        }
    }
    emit(io, emit_pairwise_table(&rows), args.format)
}

fn cmd_rounds_diff(args: &RoundsArgs, config: &CliConfig, io: &mut Io<'_>) -> Result<(), CliError> {
    if args.round1.overlaps(&args.round2) {
        return Err(CliError::Usage(format!(
            "rounds {} and {} overlap",
            args.round1, args.round2
        )));
    }
    let store = load(config, io)?;
    let mut rows = Vec::new();
    for engine in &args.engines {
        let first = period(&store, engine, &args.query, args.round1, "round1")?;
        let second = period(&store, engine, &args.query, args.round2, "round2")?;
        rows.push(DiffRow {
            engine: engine.clone(),
            diff: round_diff(&round_stats(&first), &round_stats(&second))?,
        });
    }
    emit(io, emit_rounds_diff_table(&rows), args.format)
}

fn cmd_trajectory(
    args: &TrajectoryArgs,
    config: &CliConfig,
    io: &mut Io<'_>,
) -> Result<(), CliError> {
    let store = load(config, io)?;
    let range = args.range.unwrap_or(DateRange::ALL);
    let p = period(&store, &args.engine, &args.query, range, "period")?;
    let csv = emit_trajectory_csv(&trajectory(&p));
    match &args.out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| io_error(&format!("cannot write {}", path.display()), e)),
        None => io.print(&csv),
    }
}

/// Runs the command line with explicit arguments and output streams,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    let result = resolve_config(&cli).and_then(|config| match &cli.command {
        Command::Validate => cmd_validate(&config, &mut io),
        Command::Compare(args) => cmd_compare(args, &config, &mut io),
        Command::Timeseries(args) => cmd_timeseries(args, &config, &mut io),
        Command::Cross(args) => cmd_cross(args, &config, &mut io),
        Command::RoundsDiff(args) => cmd_rounds_diff(args, &config, &mut io),
        Command::Trajectory(args) => cmd_trajectory(args, &config, &mut io),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}", e.message());
            e.exit_code()
        }
    }
}
