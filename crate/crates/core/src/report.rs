//! Fixed-format rendering of analysis results.
//!
//! Every table is produced twice: as an aligned text table for terminals,
//! with measures rounded to two decimals and trailing zeros dropped, and as
//! CSV with full-precision values. Undefined values render as `N/A` in both.

use csv::Writer;

use crate::longitudinal::{MeasureSummary, RoundDiff, RoundStats, Stats, Trajectory};

pub const NOT_AVAILABLE: &str = "N/A";

/// The table layouts this module produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    RoundSummary,
    PairwiseSummary,
    RoundDiff,
    Trajectory,
}

impl TableKind {
    /// Column headers. For trajectories only the leading column is fixed;
    /// one column per date follows.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            TableKind::RoundSummary => &[
                "engine",
                "O_avg",
                "O_min",
                "F_avg",
                "F_min",
                "G_avg",
                "G_min",
                "M_avg",
                "M_min",
                "urls",
                "first_last_overlap",
            ],
            TableKind::PairwiseSummary => &[
                "pair", "O_avg", "O_min", "O_max", "F_avg", "F_min", "F_max", "G_avg", "G_min",
                "G_max", "M_avg", "M_min", "M_max",
            ],
            TableKind::RoundDiff => &[
                "engine",
                "urls_both_periods",
                "overlap",
                "missing_from_second",
                "min_change",
                "max_change",
            ],
            TableKind::Trajectory => &["item"],
        }
    }
}

/// A rendered table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub csv: String,
}

/// Two-decimal fixed point with trailing zeros removed: `1`, `0.5`, `0.35`.
pub fn format_measure(value: f64) -> String {
    let fixed = format!("{value:.2}");
    let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
    match trimmed {
        "-0" | "" => "0".to_owned(),
        other => other.to_owned(),
    }
}

fn format_opt(value: Option<f64>) -> String {
    value.map_or_else(|| NOT_AVAILABLE.to_owned(), format_measure)
}

fn full_opt(value: Option<f64>) -> String {
    value.map_or_else(|| NOT_AVAILABLE.to_owned(), |v| v.to_string())
}

/// A cell holding both renderings of one value.
struct Cell {
    text: String,
    csv: String,
}

impl Cell {
    fn label(s: &str) -> Self {
        Cell {
            text: s.to_owned(),
            csv: s.to_owned(),
        }
    }

    fn count(n: usize) -> Self {
        Cell::label(&n.to_string())
    }

    fn optional(v: Option<f64>) -> Self {
        Cell {
            text: format_opt(v),
            csv: full_opt(v),
        }
    }
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (i, (cell, &w)) in row.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.push_str("  ");
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut writer = Writer::from_writer(Vec::new());
    writer.write_record(header).expect("writing to memory");
    for row in rows {
        writer.write_record(row).expect("writing to memory");
    }
    let bytes = writer.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("inputs are UTF-8")
}

fn render(header: &[&str], rows: Vec<Vec<Cell>>) -> Rendered {
    let header: Vec<String> = header.iter().map(|h| (*h).to_owned()).collect();
    let text_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|c| c.text.clone()).collect())
        .collect();
    let csv_rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|c| c.csv).collect())
        .collect();
    Rendered {
        text: aligned(&header, &text_rows),
        csv: to_csv(&header, &csv_rows),
    }
}

fn stats_cells(stats: Option<Stats>, with_max: bool) -> Vec<Cell> {
    let mut cells = vec![
        Cell::optional(stats.map(|s| s.avg)),
        Cell::optional(stats.map(|s| s.min)),
    ];
    if with_max {
        cells.push(Cell::optional(stats.map(|s| s.max)));
    }
    cells
}

/// One engine's line in a round table.
#[derive(Debug, Clone)]
pub struct RoundRow {
    pub engine: String,
    pub summary: MeasureSummary,
    pub stats: RoundStats,
}

/// Self-similarity over time, one row per engine in input order.
pub fn emit_round_table(rows: &[RoundRow]) -> Rendered {
    let rows = rows
        .iter()
        .map(|row| {
            let s = &row.summary;
            let mut cells = vec![Cell::label(&row.engine)];
            cells.extend(stats_cells(Some(s.overlap), false));
            cells.extend(stats_cells(s.f, false));
            cells.extend(stats_cells(Some(s.g), false));
            cells.extend(stats_cells(Some(s.m), false));
            cells.push(Cell::count(row.stats.distinct_urls));
            cells.push(Cell::count(row.stats.first_last.overlap));
            cells
        })
        .collect();
    render(TableKind::RoundSummary.columns(), rows)
}

/// One engine pair's line in a pairwise table.
#[derive(Debug, Clone)]
pub struct PairRow {
    pub engine_a: String,
    pub engine_b: String,
    pub summary: MeasureSummary,
}

/// Same-day comparison of engine pairs, rows sorted by pair name.
pub fn emit_pairwise_table(rows: &[PairRow]) -> Rendered {
    let mut sorted: Vec<&PairRow> = rows.iter().collect();
    sorted.sort_by(|a, b| (&a.engine_a, &a.engine_b).cmp(&(&b.engine_a, &b.engine_b)));
    let rows = sorted
        .into_iter()
        .map(|row| {
            let s = &row.summary;
            let mut cells = vec![Cell::label(&format!("{}-{}", row.engine_a, row.engine_b))];
            cells.extend(stats_cells(Some(s.overlap), true));
            cells.extend(stats_cells(s.f, true));
            cells.extend(stats_cells(Some(s.g), true));
            cells.extend(stats_cells(Some(s.m), true));
            cells
        })
        .collect();
    render(TableKind::PairwiseSummary.columns(), rows)
}

/// One engine's line in a round-diff table.
#[derive(Debug, Clone)]
pub struct DiffRow {
    pub engine: String,
    pub diff: RoundDiff,
}

pub fn emit_rounds_diff_table(rows: &[DiffRow]) -> Rendered {
    let rows = rows
        .iter()
        .map(|row| {
            let d = &row.diff;
            vec![
                Cell::label(&row.engine),
                Cell::count(d.urls_both_rounds_union),
                Cell::count(d.overlap),
                Cell::count(d.missing_from_second),
                Cell::optional(d.min_change),
                Cell::optional(d.max_change),
            ]
        })
        .collect();
    render(TableKind::RoundDiff.columns(), rows)
}

/// Item-by-date rank matrix. Absent cells are empty.
pub fn emit_trajectory_csv(t: &Trajectory) -> String {
    let header: Vec<String> = TableKind::Trajectory
        .columns()
        .iter()
        .map(|c| (*c).to_owned())
        .chain(t.dates.iter().map(|d| d.format("%Y-%m-%d").to_string()))
        .collect();
    let rows: Vec<Vec<String>> = t
        .items
        .iter()
        .zip(&t.grid)
        .map(|(item, ranks)| {
            std::iter::once(item.clone())
                .chain(ranks.iter().map(|r| r.map_or_else(String::new, |r| r.to_string())))
                .collect()
        })
        .collect();
    to_csv(&header, &rows)
}
