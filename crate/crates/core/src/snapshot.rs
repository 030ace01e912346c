//! Dated top-k observations and their on-disk formats.
//!
//! A snapshot file is JSON Lines, one observation per line:
//!
//! ```text
//! {"engine":"google","query":"DNA evidence","kind":"text","date":"2004-10-22","results":["u1","u2"]}
//! ```
//!
//! The first element of `results` has rank 1. A CSV form with the header
//! `engine,query,kind,date,rank,url` (one row per result) is accepted on
//! ingest and converted to the same model.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{ListError, TopKList};

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Text,
    Image,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Text => "text",
            Kind::Image => "image",
        })
    }
}

/// One (engine, query, day) observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub engine: String,
    pub query: String,
    pub kind: Kind,
    pub date: NaiveDate,
    pub list: TopKList,
}

/// Wire form of a [`Snapshot`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub engine: String,
    pub query: String,
    pub kind: Kind,
    pub date: String,
    pub results: Vec<String>,
}

impl Snapshot {
    pub fn to_record(&self) -> SnapshotRecord {
        SnapshotRecord {
            engine: self.engine.clone(),
            query: self.query.clone(),
            kind: self.kind,
            date: self.date.format(DATE_FORMAT).to_string(),
            results: self.list.items().to_vec(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("record serialization is infallible")
    }

    pub fn key(&self) -> SnapshotKey {
        SnapshotKey {
            engine: self.engine.clone(),
            query: self.query.clone(),
            date: self.date,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SnapshotKey {
    pub engine: String,
    pub query: String,
    pub date: NaiveDate,
}

impl fmt::Display for SnapshotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?}, {})", self.engine, self.query, self.date)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("invalid date {0:?}, expected YYYY-MM-DD")]
    BadDate(String),
    #[error("field {0:?} is empty")]
    EmptyField(&'static str),
    #[error(transparent)]
    List(#[from] ListError),
    #[error("ranks for one snapshot must be 1..n without gaps, got {0:?}")]
    BadRanks(Vec<usize>),
    #[error("rows for one snapshot disagree on kind")]
    MixedKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Parse(String),
    #[error("invalid record: {0}")]
    Validation(#[from] ValidationError),
}

/// Non-fatal findings from ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    ShortList {
        line: Option<usize>,
        key: SnapshotKey,
        len: usize,
        k: usize,
    },
    Gap {
        engine: String,
        query: String,
        after: NaiveDate,
        before: NaiveDate,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ShortList { line, key, len, k } => {
                if let Some(line) = line {
                    write!(f, "line {line}: ")?;
                }
                write!(f, "short list for {key}: {len} of {k} results")
            }
            Warning::Gap {
                engine,
                query,
                after,
                before,
            } => {
                let missing = (*before - *after).num_days() - 1;
                write!(
                    f,
                    "gap for ({engine}, {query:?}): {missing} day(s) missing between {after} and {before}"
                )
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {source}")]
    Record { line: usize, source: RecordError },
    #[error("line {line}: duplicate snapshot {key} (first seen on line {first_line})")]
    DuplicateKey {
        line: usize,
        first_line: usize,
        key: SnapshotKey,
    },
}

impl StoreError {
    /// True for errors caused by file content rather than file access.
    pub fn is_validation(&self) -> bool {
        !matches!(self, StoreError::Io { .. })
    }
}

fn parse_date(raw: &str) -> Result<NaiveDate, ValidationError> {
    let bytes = raw.as_bytes();
    let shaped = bytes.len() == 10 && bytes[4] == b'-' && bytes[7] == b'-';
    if !shaped {
        return Err(ValidationError::BadDate(raw.to_owned()));
    }
    NaiveDate::parse_from_str(raw, DATE_FORMAT).map_err(|_| ValidationError::BadDate(raw.to_owned()))
}

/// Lowercases the scheme and host of a URL, leaving path, query and
/// fragment untouched. Strings without `://` are returned unchanged.
pub fn normalize_host(url: &str) -> String {
    let Some(scheme_end) = url.find("://") else {
        return url.to_owned();
    };
    let authority_start = scheme_end + 3;
    let authority_end = url[authority_start..]
        .find(['/', '?', '#'])
        .map_or(url.len(), |i| authority_start + i);
    let mut out = url[..authority_end].to_ascii_lowercase();
    out.push_str(&url[authority_end..]);
    out
}

/// Ingestion settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub k: usize,
    pub normalize_host: bool,
}

impl LoadOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            normalize_host: false,
        }
    }
}

fn build_snapshot(
    record: SnapshotRecord,
    opts: &LoadOptions,
    line: Option<usize>,
) -> Result<(Snapshot, Option<Warning>), ValidationError> {
    if record.engine.is_empty() {
        return Err(ValidationError::EmptyField("engine"));
    }
    if record.query.is_empty() {
        return Err(ValidationError::EmptyField("query"));
    }
    let date = parse_date(&record.date)?;
    let results = if opts.normalize_host {
        record.results.iter().map(|u| normalize_host(u)).collect()
    } else {
        record.results
    };
    let list = TopKList::new(opts.k, results)?;
    let snapshot = Snapshot {
        engine: record.engine,
        query: record.query,
        kind: record.kind,
        date,
        list,
    };
    let warning = (!snapshot.list.is_full()).then(|| Warning::ShortList {
        line,
        key: snapshot.key(),
        len: snapshot.list.len(),
        k: opts.k,
    });
    Ok((snapshot, warning))
}

/// Parses and validates one JSON Lines record against cutoff `k`.
///
/// A list shorter than `k` is accepted and reported through the returned
/// warning.
pub fn parse_snapshot_record(
    line: &str,
    k: usize,
) -> Result<(Snapshot, Option<Warning>), RecordError> {
    parse_record_with(line, &LoadOptions::new(k), None)
}

fn parse_record_with(
    line: &str,
    opts: &LoadOptions,
    line_no: Option<usize>,
) -> Result<(Snapshot, Option<Warning>), RecordError> {
    let record: SnapshotRecord =
        serde_json::from_str(line).map_err(|e| RecordError::Parse(e.to_string()))?;
    Ok(build_snapshot(record, opts, line_no)?)
}

/// Snapshots keyed by (engine, query, date), all sharing one cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotStore {
    k: usize,
    snapshots: BTreeMap<SnapshotKey, Snapshot>,
}

impl SnapshotStore {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            snapshots: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Adds a snapshot, handing it back if its key is already taken or its
    /// cutoff differs from the store's.
    pub fn insert(&mut self, snapshot: Snapshot) -> Result<(), Snapshot> {
        if snapshot.list.k() != self.k {
            return Err(snapshot);
        }
        match self.snapshots.entry(snapshot.key()) {
            Entry::Occupied(_) => Err(snapshot),
            Entry::Vacant(slot) => {
                slot.insert(snapshot);
                Ok(())
            }
        }
    }

    pub fn get(&self, engine: &str, query: &str, date: NaiveDate) -> Option<&Snapshot> {
        self.snapshots.get(&SnapshotKey {
            engine: engine.to_owned(),
            query: query.to_owned(),
            date,
        })
    }

    /// All snapshots, ordered by engine, query, then date.
    pub fn iter(&self) -> impl Iterator<Item = &Snapshot> {
        self.snapshots.values()
    }

    /// Snapshots for one (engine, query), in date order.
    pub fn series<'a>(
        &'a self,
        engine: &'a str,
        query: &'a str,
    ) -> impl Iterator<Item = &'a Snapshot> + 'a {
        self.snapshots
            .values()
            .filter(move |s| s.engine == engine && s.query == query)
    }

    /// Distinct (engine, query) pairs in the store.
    pub fn keys(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        for s in self.snapshots.values() {
            if out.last().is_none_or(|(e, q)| *e != s.engine || *q != s.query) {
                out.push((s.engine.clone(), s.query.clone()));
            }
        }
        out
    }

    /// One warning per run of missing calendar days within each
    /// (engine, query) series.
    pub fn gap_warnings(&self) -> Vec<Warning> {
        let mut warnings = Vec::new();
        let mut prev: Option<&Snapshot> = None;
        for s in self.snapshots.values() {
            if let Some(p) = prev {
                let same_series = p.engine == s.engine && p.query == s.query;
                if same_series && (s.date - p.date).num_days() > 1 {
                    warnings.push(Warning::Gap {
                        engine: s.engine.clone(),
                        query: s.query.clone(),
                        after: p.date,
                        before: s.date,
                    });
                }
            }
            prev = Some(s);
        }
        warnings
    }
}

struct Loader {
    store: SnapshotStore,
    first_lines: HashMap<SnapshotKey, usize>,
    warnings: Vec<Warning>,
}

impl Loader {
    fn new(k: usize) -> Self {
        Self {
            store: SnapshotStore::new(k),
            first_lines: HashMap::new(),
            warnings: Vec::new(),
        }
    }

    fn add(
        &mut self,
        line: usize,
        snapshot: Snapshot,
        warning: Option<Warning>,
    ) -> Result<(), StoreError> {
        let key = snapshot.key();
        if let Some(&first_line) = self.first_lines.get(&key) {
            return Err(StoreError::DuplicateKey {
                line,
                first_line,
                key,
            });
        }
        self.first_lines.insert(key, line);
        self.store
            .insert(snapshot)
            .expect("cutoff and key were checked");
        self.warnings.extend(warning);
        Ok(())
    }

    fn finish(mut self) -> (SnapshotStore, Vec<Warning>) {
        self.warnings.extend(self.store.gap_warnings());
        (self.store, self.warnings)
    }
}

/// Reads a JSON Lines (or `.csv`) snapshot file.
///
/// Returns the store and the ingestion warnings: short lists in file order,
/// followed by date gaps.
pub fn load_store(path: &Path, k: usize) -> Result<(SnapshotStore, Vec<Warning>), StoreError> {
    load_store_with(path, &LoadOptions::new(k))
}

pub fn load_store_with(
    path: &Path,
    opts: &LoadOptions,
) -> Result<(SnapshotStore, Vec<Warning>), StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_owned(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    if is_csv {
        load_csv_str(&text, opts)
    } else {
        load_jsonl_str(&text, opts)
    }
}

/// Parses JSON Lines content. Blank lines are skipped.
pub fn load_jsonl_str(
    text: &str,
    opts: &LoadOptions,
) -> Result<(SnapshotStore, Vec<Warning>), StoreError> {
    let mut loader = Loader::new(opts.k);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (snapshot, warning) = parse_record_with(raw, opts, Some(line))
            .map_err(|source| StoreError::Record { line, source })?;
        loader.add(line, snapshot, warning)?;
    }
    Ok(loader.finish())
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    engine: String,
    query: String,
    kind: Kind,
    date: String,
    rank: usize,
    url: String,
}

struct CsvGroup {
    line: usize,
    kind: Kind,
    mixed_kind: bool,
    rows: Vec<(usize, String)>,
}

/// Parses CSV content with header `engine,query,kind,date,rank,url`.
///
/// Rows are grouped by (engine, query, date); a group's line number is that
/// of its first row.
pub fn load_csv_str(
    text: &str,
    opts: &LoadOptions,
) -> Result<(SnapshotStore, Vec<Warning>), StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut groups: HashMap<(String, String, String), CsvGroup> = HashMap::new();
    let headers = reader
        .headers()
        .map_err(|e| StoreError::Record {
            line: 1,
            source: RecordError::Parse(e.to_string()),
        })?
        .clone();
    for result in reader.records() {
        let parse_error = |line: usize, e: csv::Error| StoreError::Record {
            line,
            source: RecordError::Parse(e.to_string()),
        };
        let raw = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, e)
        })?;
        let line = raw.position().map_or(0, |p| p.line() as usize);
        let row: CsvRow = raw
            .deserialize(Some(&headers))
            .map_err(|e| parse_error(line, e))?;
        let key = (row.engine, row.query, row.date);
        let group = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            CsvGroup {
                line,
                kind: row.kind,
                mixed_kind: false,
                rows: Vec::new(),
            }
        });
        group.mixed_kind |= group.kind != row.kind;
        group.rows.push((row.rank, row.url));
    }

    let mut loader = Loader::new(opts.k);
    for key in order {
        let mut group = groups.remove(&key).expect("every ordered key has a group");
        let line = group.line;
        let invalid = |e: ValidationError| StoreError::Record {
            line,
            source: RecordError::Validation(e),
        };
        if group.mixed_kind {
            return Err(invalid(ValidationError::MixedKind));
        }
        group.rows.sort_by_key(|(rank, _)| *rank);
        let ranks: Vec<usize> = group.rows.iter().map(|(r, _)| *r).collect();
        if ranks.iter().enumerate().any(|(i, &r)| r != i + 1) {
            return Err(invalid(ValidationError::BadRanks(ranks)));
        }
        let (engine, query, date) = key;
        let record = SnapshotRecord {
            engine,
            query,
            kind: group.kind,
            date,
            results: group.rows.into_iter().map(|(_, url)| url).collect(),
        };
        let (snapshot, warning) = build_snapshot(record, opts, Some(line)).map_err(invalid)?;
        loader.add(line, snapshot, warning)?;
    }
    Ok(loader.finish())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error("no snapshots for ({engine}, {query:?}) between {from} and {to}")]
    NoData {
        engine: String,
        query: String,
        from: NaiveDate,
        to: NaiveDate,
    },
    #[error("an observation period needs at least one snapshot")]
    Empty,
    #[error("snapshots in one period must share engine, query, kind and k")]
    Inconsistent,
    #[error("two snapshots in one period share the date {0}")]
    DuplicateDate(NaiveDate),
}

/// Date-ordered snapshots of one (engine, query).
///
/// Dates are strictly increasing but need not be consecutive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationPeriod {
    pub label: String,
    snapshots: Vec<Snapshot>,
}

impl ObservationPeriod {
    /// Builds a period from snapshots in any order.
    pub fn new(label: impl Into<String>, mut snapshots: Vec<Snapshot>) -> Result<Self, PeriodError> {
        let first = snapshots.first().ok_or(PeriodError::Empty)?;
        let consistent = snapshots.iter().all(|s| {
            s.engine == first.engine
                && s.query == first.query
                && s.kind == first.kind
                && s.list.k() == first.list.k()
        });
        if !consistent {
            return Err(PeriodError::Inconsistent);
        }
        snapshots.sort_by_key(|s| s.date);
        if let Some(w) = snapshots.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(PeriodError::DuplicateDate(w[0].date));
        }
        Ok(Self {
            label: label.into(),
            snapshots,
        })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    /// Always false; construction rejects empty periods.
    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn engine(&self) -> &str {
        &self.snapshots[0].engine
    }

    pub fn query(&self) -> &str {
        &self.snapshots[0].query
    }

    pub fn kind(&self) -> Kind {
        self.snapshots[0].kind
    }

    pub fn k(&self) -> usize {
        self.snapshots[0].list.k()
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    /// First and last date.
    pub fn span(&self) -> (NaiveDate, NaiveDate) {
        (self.first().date, self.last().date)
    }
}

/// Snapshots of (engine, query) dated within `from..=to`.
pub fn select_period(
    store: &SnapshotStore,
    engine: &str,
    query: &str,
    from: NaiveDate,
    to: NaiveDate,
    label: &str,
) -> Result<ObservationPeriod, PeriodError> {
    let snapshots: Vec<Snapshot> = store
        .series(engine, query)
        .filter(|s| from <= s.date && s.date <= to)
        .cloned()
        .collect();
    if snapshots.is_empty() {
        return Err(PeriodError::NoData {
            engine: engine.to_owned(),
            query: query.to_owned(),
            from,
            to,
        });
    }
    ObservationPeriod::new(label, snapshots)
}
