//! Analyses over observation periods: consecutive-snapshot series for one
//! engine, same-day series for two engines, per-period summaries, round
//! statistics, round-to-round drift, and rank trajectories.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::measures::{compare, ComparisonResult};
use crate::snapshot::ObservationPeriod;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("need at least 2 snapshots for a series, found {found}")]
    TooFewSnapshots { found: usize },
    #[error("periods are for different queries ({left:?} vs {right:?})")]
    QueryMismatch { left: String, right: String },
    #[error("periods have different cutoffs (k={left} vs k={right})")]
    KMismatch { left: usize, right: usize },
    #[error("both periods are for engine {0:?}")]
    SameEngine(String),
    #[error("the periods have no dates in common")]
    NoCommonDates,
    #[error("cannot summarize an empty series")]
    EmptySeries,
    #[error("round statistics are for different engine/query/k")]
    KeyMismatch,
}

/// One comparison within a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEntry {
    pub date_a: NaiveDate,
    pub date_b: NaiveDate,
    pub result: ComparisonResult,
    /// Set when the two dates are more than one calendar day apart.
    pub gap: bool,
}

/// Compares each snapshot with the next available one.
///
/// Missing days do not break the chain; the entry spanning them is flagged.
pub fn self_series(p: &ObservationPeriod) -> Result<Vec<SeriesEntry>, AnalysisError> {
    let snaps = p.snapshots();
    if snaps.len() < 2 {
        return Err(AnalysisError::TooFewSnapshots { found: snaps.len() });
    }
    Ok(snaps
        .windows(2)
        .map(|w| SeriesEntry {
            date_a: w[0].date,
            date_b: w[1].date,
            result: compare(&w[0].list, &w[1].list).expect("periods share one k"),
            gap: (w[1].date - w[0].date).num_days() > 1,
        })
        .collect())
}

/// Compares two engines' lists on every date both periods cover.
pub fn cross_series(
    p1: &ObservationPeriod,
    p2: &ObservationPeriod,
) -> Result<Vec<SeriesEntry>, AnalysisError> {
    if p1.query() != p2.query() {
        return Err(AnalysisError::QueryMismatch {
            left: p1.query().to_owned(),
            right: p2.query().to_owned(),
        });
    }
    if p1.k() != p2.k() {
        return Err(AnalysisError::KMismatch {
            left: p1.k(),
            right: p2.k(),
        });
    }
    if p1.engine() == p2.engine() {
        return Err(AnalysisError::SameEngine(p1.engine().to_owned()));
    }
    let by_date: HashMap<NaiveDate, _> = p2.snapshots().iter().map(|s| (s.date, s)).collect();
    let entries: Vec<SeriesEntry> = p1
        .snapshots()
        .iter()
        .filter_map(|a| {
            let b = by_date.get(&a.date)?;
            Some(SeriesEntry {
                date_a: a.date,
                date_b: b.date,
                result: compare(&a.list, &b.list).expect("k checked above"),
                gap: false,
            })
        })
        .collect();
    if entries.is_empty() {
        return Err(AnalysisError::NoCommonDates);
    }
    Ok(entries)
}

/// Mean, minimum and maximum of one measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub avg: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Option<Self> {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        (count > 0).then(|| Stats {
            // The mean of identical values can drift by an ulp; keep it inside
            // the observed range.
            avg: (sum / count as f64).clamp(min, max),
            min,
            max,
        })
    }
}

/// Per-measure aggregates over a series.
///
/// Entries with undefined F are left out of the F aggregates and counted in
/// `f_undefined`; `f` is `None` when no entry has a defined F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSummary {
    pub comparisons: usize,
    pub f_undefined: usize,
    pub overlap: Stats,
    pub f: Option<Stats>,
    pub g: Stats,
    pub m: Stats,
}

pub fn summarize(series: &[SeriesEntry]) -> Result<MeasureSummary, AnalysisError> {
    let results = || series.iter().map(|e| e.result);
    let overlap =
        Stats::from_values(results().map(|r| r.overlap as f64)).ok_or(AnalysisError::EmptySeries)?;
    Ok(MeasureSummary {
        comparisons: series.len(),
        f_undefined: results().filter(|r| r.f.is_none()).count(),
        overlap,
        f: Stats::from_values(results().filter_map(|r| r.f)),
        g: Stats::from_values(results().map(|r| r.g)).expect("non-empty"),
        m: Stats::from_values(results().map(|r| r.m)).expect("non-empty"),
    })
}

/// Whole-period statistics for one engine and query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundStats {
    pub engine: String,
    pub query: String,
    pub k: usize,
    pub days: usize,
    /// Size of the union of all daily lists.
    pub distinct_urls: usize,
    /// Comparison of the first and last day.
    pub first_last: ComparisonResult,
    /// Sum of an item's daily ranks divided by the days it was listed.
    pub avg_rank: BTreeMap<String, f64>,
    pub days_present: BTreeMap<String, usize>,
}

pub fn round_stats(p: &ObservationPeriod) -> RoundStats {
    let mut rank_sums: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for snapshot in p.snapshots() {
        for (rank, item) in snapshot.list.ranked() {
            let entry = rank_sums.entry(item.to_owned()).or_default();
            entry.0 += rank;
            entry.1 += 1;
        }
    }
    let avg_rank = rank_sums
        .iter()
        .map(|(item, &(sum, days))| (item.clone(), sum as f64 / days as f64))
        .collect();
    let days_present = rank_sums
        .into_iter()
        .map(|(item, (_, days))| (item, days))
        .collect::<BTreeMap<_, _>>();
    RoundStats {
        engine: p.engine().to_owned(),
        query: p.query().to_owned(),
        k: p.k(),
        days: p.len(),
        distinct_urls: days_present.len(),
        first_last: compare(&p.first().list, &p.last().list).expect("periods share one k"),
        avg_rank,
        days_present,
    }
}

/// Drift between two rounds of the same engine and query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundDiff {
    /// Items seen in either round.
    pub urls_both_rounds_union: usize,
    /// Items seen in both rounds.
    pub overlap: usize,
    /// Items of the first round never seen in the second.
    pub missing_from_second: usize,
    /// Smallest |avg rank change| over items seen in both rounds.
    pub min_change: Option<f64>,
    pub max_change: Option<f64>,
}

pub fn round_diff(r1: &RoundStats, r2: &RoundStats) -> Result<RoundDiff, AnalysisError> {
    if r1.engine != r2.engine || r1.query != r2.query || r1.k != r2.k {
        return Err(AnalysisError::KeyMismatch);
    }
    let first: BTreeSet<&String> = r1.avg_rank.keys().collect();
    let second: BTreeSet<&String> = r2.avg_rank.keys().collect();
    let changes: Vec<f64> = first
        .intersection(&second)
        .map(|item| (r1.avg_rank[*item] - r2.avg_rank[*item]).abs())
        .collect();
    let stats = Stats::from_values(changes.iter().copied());
    Ok(RoundDiff {
        urls_both_rounds_union: first.union(&second).count(),
        overlap: changes.len(),
        missing_from_second: first.difference(&second).count(),
        min_change: stats.map(|s| s.min),
        max_change: stats.map(|s| s.max),
    })
}

/// Rank of every item on every date of a period; `None` where the item was
/// not listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    /// Ordered by first appearance, then by rank on that first day.
    pub items: Vec<String>,
    pub dates: Vec<NaiveDate>,
    /// `grid[i][d]` is the rank of `items[i]` on `dates[d]`.
    pub grid: Vec<Vec<Option<usize>>>,
}

impl Trajectory {
    pub fn row(&self, item: &str) -> Option<&[Option<usize>]> {
        let idx = self.items.iter().position(|i| i == item)?;
        Some(&self.grid[idx])
    }
}

pub fn trajectory(p: &ObservationPeriod) -> Trajectory {
    let dates: Vec<NaiveDate> = p.snapshots().iter().map(|s| s.date).collect();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut items: Vec<String> = Vec::new();
    let mut grid: Vec<Vec<Option<usize>>> = Vec::new();
    for (col, snapshot) in p.snapshots().iter().enumerate() {
        for (rank, item) in snapshot.list.ranked() {
            let row = *index.entry(item).or_insert_with(|| {
                items.push(item.to_owned());
                grid.push(vec![None; dates.len()]);
                items.len() - 1
            });
            grid[row][col] = Some(rank);
        }
    }
    Trajectory { items, dates, grid }
}
