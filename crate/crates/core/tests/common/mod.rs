//! Brute-force reference implementations used to derive expected values.
//!
//! Nothing here calls into the library's measure or analysis code: lists
//! are plain string slices and every measure is evaluated literally from its
//! defining sum.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

fn position(list: &[String], item: &str) -> Option<usize> {
    list.iter().position(|x| x == item).map(|i| i + 1)
}

fn union(a: &[String], b: &[String]) -> BTreeSet<String> {
    a.iter().chain(b).cloned().collect()
}

pub fn oracle_overlap(a: &[String], b: &[String]) -> usize {
    a.iter().filter(|x| b.contains(x)).count()
}

/// Footrule with every missing item placed at rank `k + 1`, summed over the
/// union of both lists.
pub fn oracle_g(a: &[String], b: &[String], k: usize) -> f64 {
    let distance: usize = union(a, b)
        .iter()
        .map(|item| {
            let ra = position(a, item).unwrap_or(k + 1);
            let rb = position(b, item).unwrap_or(k + 1);
            ra.abs_diff(rb)
        })
        .sum();
    1.0 - distance as f64 / (k * (k + 1)) as f64
}

/// Term-by-term reciprocal-rank distance normalized by `2(H_k - k/(k+1))`.
pub fn oracle_m(a: &[String], b: &[String], k: usize) -> f64 {
    let floor = 1.0 / (k as f64 + 1.0);
    let mut distance = 0.0;
    for item in union(a, b) {
        distance += match (position(a, &item), position(b, &item)) {
            (Some(ra), Some(rb)) => (1.0 / ra as f64 - 1.0 / rb as f64).abs(),
            (Some(r), None) | (None, Some(r)) => 1.0 / r as f64 - floor,
            (None, None) => unreachable!(),
        };
    }
    let harmonic: f64 = (1..=k).map(|r| 1.0 / r as f64).sum();
    let normalizer = 2.0 * (harmonic - k as f64 / (k as f64 + 1.0));
    1.0 - distance / normalizer
}

/// Eliminate non-shared items, re-rank the survivors, sum the rank
/// differences and divide by the distance of a full reversal.
pub fn oracle_f(a: &[String], b: &[String]) -> Option<f64> {
    let kept_a: Vec<String> = a.iter().filter(|x| b.contains(x)).cloned().collect();
    let kept_b: Vec<String> = b.iter().filter(|x| a.contains(x)).cloned().collect();
    let z = kept_a.len();
    if z <= 1 {
        return None;
    }
    let distance: usize = kept_a
        .iter()
        .map(|item| position(&kept_a, item).unwrap().abs_diff(position(&kept_b, item).unwrap()))
        .sum();
    let reversal: usize = (1..=z).map(|i| i.abs_diff(z + 1 - i)).sum();
    Some(1.0 - distance as f64 / reversal as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub o: usize,
    pub f: Option<f64>,
    pub g: f64,
    pub m: f64,
}

pub fn oracle_all(a: &[String], b: &[String], k: usize) -> Measures {
    Measures {
        o: oracle_overlap(a, b),
        f: oracle_f(a, b),
        g: oracle_g(a, b, k),
        m: oracle_m(a, b, k),
    }
}

/// A snapshot read straight from JSON, bypassing the library parser.
#[derive(Debug, Clone)]
pub struct RawSnapshot {
    pub engine: String,
    pub query: String,
    pub date: String,
    pub results: Vec<String>,
}

pub fn read_raw(name: &str) -> Vec<RawSnapshot> {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            RawSnapshot {
                engine: v["engine"].as_str().unwrap().to_owned(),
                query: v["query"].as_str().unwrap().to_owned(),
                date: v["date"].as_str().unwrap().to_owned(),
                results: v["results"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_str().unwrap().to_owned())
                    .collect(),
            }
        })
        .collect()
}

/// Date-sorted lists for one engine within an inclusive ISO date range.
pub fn raw_period(raw: &[RawSnapshot], engine: &str, from: &str, to: &str) -> Vec<RawSnapshot> {
    let mut out: Vec<RawSnapshot> = raw
        .iter()
        .filter(|s| s.engine == engine && s.date.as_str() >= from && s.date.as_str() <= to)
        .cloned()
        .collect();
    out.sort_by(|a, b| a.date.cmp(&b.date));
    out
}

pub fn avg_min_max(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let avg = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((avg, min, max))
}

pub fn two_decimals(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn cells(stats: Option<(f64, f64, f64)>, with_max: bool) -> Vec<String> {
    let mut out = Vec::new();
    match stats {
        Some((avg, min, max)) => {
            out.push(two_decimals(avg));
            out.push(two_decimals(min));
            if with_max {
                out.push(two_decimals(max));
            }
        }
        None => {
            let n = if with_max { 3 } else { 2 };
            out.extend(std::iter::repeat_n("N/A".to_owned(), n));
        }
    }
    out
}

fn summary_cells(comparisons: &[Measures], with_max: bool) -> Vec<String> {
    let o: Vec<f64> = comparisons.iter().map(|c| c.o as f64).collect();
    let f: Vec<f64> = comparisons.iter().filter_map(|c| c.f).collect();
    let g: Vec<f64> = comparisons.iter().map(|c| c.g).collect();
    let m: Vec<f64> = comparisons.iter().map(|c| c.m).collect();
    let mut out = cells(avg_min_max(&o), with_max);
    out.extend(cells(avg_min_max(&f), with_max));
    out.extend(cells(avg_min_max(&g), with_max));
    out.extend(cells(avg_min_max(&m), with_max));
    out
}

/// Expected timeseries row tokens for one engine.
pub fn expected_round_row(period: &[RawSnapshot], k: usize) -> Vec<String> {
    let comparisons: Vec<Measures> = period
        .windows(2)
        .map(|w| oracle_all(&w[0].results, &w[1].results, k))
        .collect();
    let distinct: BTreeSet<&String> = period.iter().flat_map(|s| &s.results).collect();
    let first_last = oracle_overlap(&period[0].results, &period[period.len() - 1].results);
    let mut row = vec![period[0].engine.clone()];
    row.extend(summary_cells(&comparisons, false));
    row.push(distinct.len().to_string());
    row.push(first_last.to_string());
    row
}

/// Expected cross row tokens for two engines over their common dates.
pub fn expected_pair_row(p1: &[RawSnapshot], p2: &[RawSnapshot], k: usize) -> Vec<String> {
    let comparisons: Vec<Measures> = p1
        .iter()
        .filter_map(|a| {
            let b = p2.iter().find(|b| b.date == a.date)?;
            Some(oracle_all(&a.results, &b.results, k))
        })
        .collect();
    let mut row = vec![format!("{}-{}", p1[0].engine, p2[0].engine)];
    row.extend(summary_cells(&comparisons, true));
    row
}

pub fn oracle_avg_ranks(period: &[RawSnapshot]) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for s in period {
        for (i, item) in s.results.iter().enumerate() {
            acc.entry(item.clone()).or_default().push(i + 1);
        }
    }
    acc.into_iter()
        .map(|(item, ranks)| {
            let avg = ranks.iter().sum::<usize>() as f64 / ranks.len() as f64;
            (item, avg)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleDiff {
    pub union: usize,
    pub overlap: usize,
    pub missing: usize,
    pub min_change: Option<f64>,
    pub max_change: Option<f64>,
}

pub fn oracle_round_diff(r1: &[RawSnapshot], r2: &[RawSnapshot]) -> OracleDiff {
    let a = oracle_avg_ranks(r1);
    let b = oracle_avg_ranks(r2);
    let changes: Vec<f64> = a
        .iter()
        .filter_map(|(item, ra)| b.get(item).map(|rb| (ra - rb).abs()))
        .collect();
    let all: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let stats = avg_min_max(&changes);
    OracleDiff {
        union: all.len(),
        overlap: changes.len(),
        missing: a.keys().filter(|i| !b.contains_key(*i)).count(),
        min_change: stats.map(|s| s.1),
        max_change: stats.map(|s| s.2),
    }
}

pub fn expected_diff_row(engine: &str, d: &OracleDiff) -> Vec<String> {
    let opt = |v: Option<f64>| v.map_or_else(|| "N/A".to_owned(), two_decimals);
    vec![
        engine.to_owned(),
        d.union.to_string(),
        d.overlap.to_string(),
        d.missing.to_string(),
        opt(d.min_change),
        opt(d.max_change),
    ]
}

/// Two k=10 lists whose only shared items sit at the given rank pairs.
pub fn constructed(pairs: &[(usize, usize)]) -> (Vec<String>, Vec<String>) {
    let mut a: Vec<String> = (1..=10).map(|r| format!("a{r}")).collect();
    let mut b: Vec<String> = (1..=10).map(|r| format!("b{r}")).collect();
    for (i, &(ra, rb)) in pairs.iter().enumerate() {
        a[ra - 1] = format!("s{i}");
        b[rb - 1] = format!("s{i}");
    }
    (a, b)
}
