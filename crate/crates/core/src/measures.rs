//! Similarity measures for pairs of top-k lists.
//!
//! Four measures are provided, all computed from the same decomposition of
//! a list pair into shared items and items unique to either side:
//!
//! * **O**: the size of the overlap.
//! * **F**: one minus the normalized Spearman footrule over the shared
//!   items after they have been re-ranked relative to each other. Only
//!   defined when at least two items are shared.
//! * **G**: one minus the normalized footrule in which every item missing
//!   from a list is placed at rank `k + 1`.
//! * **M**: one minus a normalized sum of reciprocal-rank differences, which
//!   weights agreement near the top of the lists more heavily.
//!
//! Every measure equals 1 for identical full-length lists. G and M equal 0
//! for disjoint full-length lists.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing a [`TopKList`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("cutoff k must be at least 1")]
    ZeroCutoff,
    #[error("ranked list is empty")]
    Empty,
    #[error("ranked list has {len} items but the cutoff is k={k}")]
    TooLong { len: usize, k: usize },
    #[error("item {item:?} appears at ranks {first} and {second}; ties are not allowed")]
    Duplicate {
        item: String,
        first: usize,
        second: usize,
    },
}

/// Errors raised when comparing two lists.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("lists have different cutoffs (k={left} vs k={right})")]
    MismatchedK { left: usize, right: usize },
    #[error("the lists share no items")]
    EmptyOverlap,
}

/// An ordered list of distinct items truncated at a declared cutoff `k`.
///
/// The rank of `items[i]` is `i + 1`. Lists shorter than `k` are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopKList {
    k: usize,
    items: Vec<String>,
}

impl TopKList {
    pub fn new<I, S>(k: usize, items: I) -> Result<Self, ListError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if k == 0 {
            return Err(ListError::ZeroCutoff);
        }
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        if items.is_empty() {
            return Err(ListError::Empty);
        }
        if items.len() > k {
            return Err(ListError::TooLong {
                len: items.len(),
                k,
            });
        }
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(items.len());
        for (idx, item) in items.iter().enumerate() {
            if let Some(first) = seen.insert(item.as_str(), idx + 1) {
                return Err(ListError::Duplicate {
                    item: item.clone(),
                    first,
                    second: idx + 1,
                });
            }
        }
        Ok(Self { k, items })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Always false; construction rejects empty lists.
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// True when the list holds exactly `k` items.
    pub fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    /// 1-based rank of `item`, if present.
    pub fn rank_of(&self, item: &str) -> Option<usize> {
        self.items.iter().position(|x| x == item).map(|i| i + 1)
    }

    /// Items paired with their 1-based ranks.
    pub fn ranked(&self) -> impl Iterator<Item = (usize, &str)> {
        self.items
            .iter()
            .enumerate()
            .map(|(i, item)| (i + 1, item.as_str()))
    }

    pub fn into_items(self) -> Vec<String> {
        self.items
    }
}

/// An item present in both lists, with its rank in each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedItem {
    pub item: String,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// An item present in only one of the lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedItem {
    pub item: String,
    pub rank: usize,
}

/// Decomposition of a list pair into shared items and the items unique to
/// each side.
///
/// `shared` is ordered by rank in the first list, `only_a` by rank in the
/// first list and `only_b` by rank in the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapPartition {
    pub k: usize,
    pub shared: Vec<SharedItem>,
    pub only_a: Vec<RankedItem>,
    pub only_b: Vec<RankedItem>,
}

impl OverlapPartition {
    /// Number of shared items.
    pub fn z(&self) -> usize {
        self.shared.len()
    }
}

// Below this length a linear scan beats building a hash index.
const LINEAR_LOOKUP_MAX: usize = 32;

fn check_k(a: &TopKList, b: &TopKList) -> Result<(), MeasureError> {
    if a.k != b.k {
        return Err(MeasureError::MismatchedK {
            left: a.k,
            right: b.k,
        });
    }
    Ok(())
}

/// Splits a pair of lists into shared and one-sided items. Items are
/// matched by exact string equality.
pub fn partition(a: &TopKList, b: &TopKList) -> Result<OverlapPartition, MeasureError> {
    check_k(a, b)?;
    // rank in b of each item of a, if any
    let ranks_in_b: Vec<Option<usize>> = if b.len() <= LINEAR_LOOKUP_MAX {
        a.items.iter().map(|item| b.rank_of(item)).collect()
    } else {
        let index: HashMap<&str, usize> = b.ranked().map(|(r, item)| (item, r)).collect();
        a.items.iter().map(|item| index.get(item.as_str()).copied()).collect()
    };

    let mut shared = Vec::new();
    let mut only_a = Vec::new();
    let mut in_a = vec![false; b.len()];
    for ((rank_a, item), rank_b) in a.ranked().zip(ranks_in_b) {
        match rank_b {
            Some(rank_b) => {
                in_a[rank_b - 1] = true;
                shared.push(SharedItem {
                    item: item.to_owned(),
                    rank_a,
                    rank_b,
                });
            }
            None => only_a.push(RankedItem {
                item: item.to_owned(),
                rank: rank_a,
            }),
        }
    }
    let only_b = b
        .ranked()
        .filter(|(rank, _)| !in_a[rank - 1])
        .map(|(rank, item)| RankedItem {
            item: item.to_owned(),
            rank,
        })
        .collect();

    Ok(OverlapPartition {
        k: a.k,
        shared,
        only_a,
        only_b,
    })
}

/// Number of items common to both lists.
pub fn overlap(a: &TopKList, b: &TopKList) -> Result<usize, MeasureError> {
    Ok(partition(a, b)?.z())
}

/// Shared items re-ranked `1..=z` within each list, preserving the original
/// relative order.
///
/// Position `i` of both vectors refers to the same shared item (the `i`-th
/// entry of [`OverlapPartition::shared`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeRanking {
    pub sigma_a: Vec<usize>,
    pub sigma_b: Vec<usize>,
}

impl RelativeRanking {
    pub fn len(&self) -> usize {
        self.sigma_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_a.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sigma_a.iter().copied().zip(self.sigma_b.iter().copied())
    }
}

fn relative_ranks(ranks: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by_key(|&i| ranks[i]);
    let mut sigma = vec![0; ranks.len()];
    for (position, idx) in order.into_iter().enumerate() {
        sigma[idx] = position + 1;
    }
    sigma
}

/// Drops the non-shared items and renumbers the survivors of each list.
pub fn relative_rerank(p: &OverlapPartition) -> Result<RelativeRanking, MeasureError> {
    if p.shared.is_empty() {
        return Err(MeasureError::EmptyOverlap);
    }
    let ranks_a: Vec<usize> = p.shared.iter().map(|s| s.rank_a).collect();
    let ranks_b: Vec<usize> = p.shared.iter().map(|s| s.rank_b).collect();
    Ok(RelativeRanking {
        sigma_a: relative_ranks(&ranks_a),
        sigma_b: relative_ranks(&ranks_b),
    })
}

/// Spearman's footrule: the L1 distance between two permutations.
pub fn footrule_distance(r: &RelativeRanking) -> usize {
    r.pairs().map(|(x, y)| x.abs_diff(y)).sum()
}

/// Largest footrule distance between two permutations of `n` elements,
/// `n²/2` for even `n` and `(n+1)(n-1)/2` for odd `n`.
pub fn max_footrule(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n * n / 2
    } else {
        (n + 1) * (n - 1) / 2
    }
}

fn footrule_from_partition(p: &OverlapPartition) -> Option<f64> {
    if p.z() <= 1 {
        return None;
    }
    let ranking = relative_rerank(p).ok()?;
    let normalized = footrule_distance(&ranking) as f64 / max_footrule(ranking.len()) as f64;
    Some(1.0 - normalized)
}

/// The F measure. `None` when fewer than two items are shared.
pub fn footrule_f(a: &TopKList, b: &TopKList) -> Result<Option<f64>, MeasureError> {
    Ok(footrule_from_partition(&partition(a, b)?))
}

/// Normalizer of the `k + 1` footrule: its value for two disjoint full
/// lists, `k(k + 1)`.
pub fn fagin_normalizer(k: usize) -> usize {
    k * (k + 1)
}

/// Footrule distance with every missing item placed at rank `k + 1`.
///
/// For full-length lists this is
/// `2(k - z)(k + 1) + Σ_Z |τa - τb| - Σ_{only a} τa - Σ_{only b} τb`.
pub fn fagin_distance(p: &OverlapPartition) -> usize {
    let placement = p.k + 1;
    let shared: usize = p.shared.iter().map(|s| s.rank_a.abs_diff(s.rank_b)).sum();
    let one_sided = p.only_a.len() + p.only_b.len();
    let one_sided_ranks: usize = p.only_a.iter().chain(&p.only_b).map(|r| r.rank).sum();
    one_sided * placement + shared - one_sided_ranks
}

fn fagin_from_partition(p: &OverlapPartition) -> f64 {
    1.0 - fagin_distance(p) as f64 / fagin_normalizer(p.k) as f64
}

/// The G measure.
pub fn fagin_g(a: &TopKList, b: &TopKList) -> Result<f64, MeasureError> {
    Ok(fagin_from_partition(&partition(a, b)?))
}

// Σ over ranks of (1/r - 1/(k+1)), accumulated in rank order so that the
// normalizer and the disjoint-list distance are bitwise identical.
fn reciprocal_excess<I: IntoIterator<Item = usize>>(ranks: I, k: usize) -> f64 {
    let floor = 1.0 / (k + 1) as f64;
    ranks
        .into_iter()
        .fold(0.0, |acc, r| acc + (1.0 / r as f64 - floor))
}

/// Normalizer of the reciprocal-rank distance, `2(H_k - k/(k + 1))`.
pub fn m_normalizer(k: usize) -> f64 {
    2.0 * reciprocal_excess(1..=k, k)
}

/// The unnormalized reciprocal-rank distance.
pub fn reciprocal_distance(p: &OverlapPartition) -> f64 {
    let shared: f64 = p
        .shared
        .iter()
        .map(|s| (1.0 / s.rank_a as f64 - 1.0 / s.rank_b as f64).abs())
        .sum();
    let only_a = reciprocal_excess(p.only_a.iter().map(|r| r.rank), p.k);
    let only_b = reciprocal_excess(p.only_b.iter().map(|r| r.rank), p.k);
    shared + only_a + only_b
}

fn m_from_partition(p: &OverlapPartition) -> f64 {
    1.0 - reciprocal_distance(p) / m_normalizer(p.k)
}

/// The M measure.
pub fn m_measure(a: &TopKList, b: &TopKList) -> Result<f64, MeasureError> {
    Ok(m_from_partition(&partition(a, b)?))
}

/// All four measures for one list pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub overlap: usize,
    /// `None` when the overlap is 0 or 1.
    pub f: Option<f64>,
    pub g: f64,
    pub m: f64,
}

impl fmt::Display for ComparisonResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let footrule = match self.f {
            Some(v) => format!("{v:.2}"),
            None => "N/A".to_owned(),
        };
        write!(
            f,
            "O={} F={} G={:.2} M={:.2}",
            self.overlap, footrule, self.g, self.m
        )
    }
}

/// Computes O, F, G and M from a single partition of the pair.
pub fn compare(a: &TopKList, b: &TopKList) -> Result<ComparisonResult, MeasureError> {
    let p = partition(a, b)?;
    Ok(ComparisonResult {
        overlap: p.z(),
        f: footrule_from_partition(&p),
        g: fagin_from_partition(&p),
        m: m_from_partition(&p),
    })
}
