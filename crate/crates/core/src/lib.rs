//! Top-k ranking similarity measures and longitudinal analysis of archived
//! search result snapshots.
//!
//! * [`measures`]: overlap, F, G and M for a pair of top-k lists.
//! * [`snapshot`]: dated observations, JSON Lines / CSV ingestion, the store.
//! * [`longitudinal`]: self-similarity over time, cross-engine comparison,
//!   round statistics and round-to-round drift.
//! * [`report`]: fixed-format text tables and CSV exports.
//! * [`cli`]: the `rankdrift` command line.

pub mod cli;
pub mod longitudinal;
pub mod measures;
pub mod report;
pub mod snapshot;

pub use longitudinal::{
    cross_series, round_diff, round_stats, self_series, summarize, trajectory, AnalysisError,
    MeasureSummary, RoundDiff, RoundStats, SeriesEntry, Stats, Trajectory,
};
pub use measures::{
    compare, fagin_g, footrule_f, m_measure, overlap, partition, relative_rerank,
    ComparisonResult, ListError, MeasureError, OverlapPartition, RelativeRanking, TopKList,
};
pub use snapshot::{
    load_store, parse_snapshot_record, select_period, Kind, ObservationPeriod, Snapshot,
    SnapshotStore, StoreError, Warning,
};
