mod common;

use std::process::{Command, Output};

use common::fixture;

fn rankdrift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankdrift"))
        .args(args)
        .env_remove("RANKDRIFT_STORE")
        .output()
        .unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn compare_table_one_files() {
    let out = rankdrift(&["compare", "-a", &path("table1_a.txt"), "-b", &path("table1_b.txt")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "O=2 F=1.00 G=0.35 M=0.65\n");

    let out = rankdrift(&["compare", "-a", &path("table1_a.txt"), "-b", &path("table1_b.txt"), "-f", "csv"]);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[1], "1");
    assert!((row[2].parse::<f64>().unwrap() - 0.345).abs() < 1e-3);
}

#[test]
fn compare_identical_and_disjoint_files() {
    let out = rankdrift(&["compare", "-a", &path("table1_a.txt"), "-b", &path("table1_a.txt")]);
    assert_eq!(stdout(&out), "O=10 F=1.00 G=1.00 M=1.00\n");
    let out = rankdrift(&["compare", "-a", &path("table1_a.txt"), "-b", &path("disjoint_b.txt")]);
    assert_eq!(stdout(&out), "O=0 F=N/A G=0.00 M=0.00\n");
}

#[test]
fn validate_outcomes() {
    let out = rankdrift(&["validate", "-s", &path("valid.jsonl")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 3 snapshot(s)\n");

    let out = rankdrift(&["validate", "-s", &path("valid.csv")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 3 snapshot(s)\n");

    let out = rankdrift(&["validate", "-s", &path("duplicate_url.jsonl")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: line 3:"), "{}", stderr(&out));

    let out = rankdrift(&["validate", "-s", &path("gap_day.jsonl")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning: gap"));
}

#[test]
fn store_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_rankdrift"))
        .arg("validate")
        .env("RANKDRIFT_STORE", path("valid.jsonl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = rankdrift(&["validate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn timeseries_stable_and_two_day() {
    let out = rankdrift(&["timeseries", "-s", &path("valid.jsonl"), "-e", "google", "-q", "DNA evidence"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row, ["google", "10", "10", "1", "1", "1", "1", "1", "1", "10", "10"]);

    let out = rankdrift(&[
        "timeseries", "-s", &path("valid.jsonl"), "-e", "google", "-q", "DNA evidence",
        "-r", "2004-10-22..2004-10-23", "-f", "csv",
    ]);
    assert_eq!(stdout(&out).lines().nth(1).unwrap(), "google,10,10,1,1,1,1,1,1,10,10");

    // a single snapshot has no consecutive pair
    let out = rankdrift(&[
        "timeseries", "-s", &path("valid.jsonl"), "-e", "google", "-q", "DNA evidence",
        "-r", "2004-10-22..2004-10-22",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selection_errors_exit_two() {
    let store = path("pipeline.jsonl");
    let out = rankdrift(&["trajectory", "-s", &store, "-e", "google", "-q", "organic food", "-r", "2003-01-01..2003-02-01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no snapshots"));

    let out = rankdrift(&["cross", "-s", &path("duplicate_key.jsonl"), "-e", "google", "-e", "yahoo", "-q", "DNA evidence"]);
    assert_eq!(out.status.code(), Some(1));

    let out = rankdrift(&["cross", "-s", &store, "-e", "google", "-q", "organic food"]);
    assert_eq!(out.status.code(), Some(2));

    let out = rankdrift(&[
        "rounds-diff", "-s", &store, "-e", "google", "-q", "organic food",
        "--round1", "2004-10-22..2005-01-30", "--round2", "2005-01-24..2005-02-13",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("overlap"));
}

#[test]
fn cross_without_common_dates() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.jsonl");
    std::fs::write(
        &store,
        concat!(
            r#"{"engine":"google","query":"q","kind":"image","date":"2005-01-24","results":["a","b"]}"#, "\n",
            r#"{"engine":"picsearch","query":"q","kind":"image","date":"2005-01-25","results":["a","b"]}"#, "\n",
        ),
    )
    .unwrap();
    let out = rankdrift(&["cross", "-s", store.to_str().unwrap(), "-e", "google", "-e", "picsearch", "-q", "q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no dates in common"));
}

#[test]
fn rounds_diff_identical_and_disjoint() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.jsonl");
    let line = |engine: &str, date: &str, items: &[&str]| {
        serde_json::json!({"engine": engine, "query": "q", "kind": "text", "date": date, "results": items}).to_string()
    };
    let text = [
        line("google", "2004-10-22", &["a", "b", "c"]),
        line("google", "2005-01-24", &["a", "b", "c"]),
        line("yahoo", "2004-10-22", &["a", "b", "c"]),
        line("yahoo", "2005-01-24", &["x", "y", "z"]),
    ]
    .join("\n");
    std::fs::write(&store, text).unwrap();
    let out = rankdrift(&[
        "rounds-diff", "-s", store.to_str().unwrap(), "-k", "3", "-e", "google", "-e", "yahoo", "-q", "q",
        "--round1", "2004-10-01..2004-12-31", "--round2", "2005-01-01..2005-03-31",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0], ["google", "3", "3", "0", "0", "0"]);
    assert_eq!(rows[1], ["yahoo", "6", "0", "3", "N/A", "N/A"]);
}

#[test]
fn trajectory_to_stdout_is_stable() {
    let out = rankdrift(&["trajectory", "-s", &path("valid.jsonl"), "-e", "google", "-q", "DNA evidence"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "item,2004-10-22,2004-10-23,2004-10-24");
    assert_eq!(lines.next().unwrap(), "http://dna1.example/,1,1,1");
    assert_eq!(text.lines().count(), 11);
    // repeated runs are byte-identical
    let again = rankdrift(&["trajectory", "-s", &path("valid.jsonl"), "-e", "google", "-q", "DNA evidence"]);
    assert_eq!(again.stdout, out.stdout);
}
