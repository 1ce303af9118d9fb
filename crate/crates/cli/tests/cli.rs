use std::path::Path;
use std::process::{Command, Output};

use partavoid::SetPartition;
use partavoid_cli::commands::{check, cmd_conjectures, dacp_convert, Status};
use partavoid_cli::{cmd_count, CliError, Counter, DacpDirection, PatternSet, ScanConfig};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_partavoid"))
        .args(args)
        .env_remove("PARTAVOID_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

fn p(s: &str) -> SetPartition {
    s.parse().unwrap()
}

#[test]
fn count_examples() {
    let o = bin(&["count", "--pattern", "123", "--n-to", "10"]);
    assert!(o.status.success());
    let counts = column(&stdout(&o), "count");
    assert_eq!(counts, ["1", "2", "4", "10", "26", "76", "232", "764", "2620", "9496"]);

    let o = bin(&["count", "--pattern", "1/2", "--n-to", "6"]);
    assert_eq!(column(&stdout(&o), "count"), ["1"; 6]);

    let o = bin(&["count", "--pattern", "12/34", "--n-to", "3"]);
    assert_eq!(column(&stdout(&o), "count"), ["1", "2", "5"]);
}

#[test]
fn f_ratio_is_absent_below_two() {
    let o = bin(&["count", "--pattern", "123", "--n-to", "2"]);
    assert_eq!(column(&stdout(&o), "f_ratio"), ["", "0.5"]);
}

#[test]
fn check_examples() {
    let r = check("124/35", "1/23").unwrap();
    assert!(r.contains);
    assert_eq!(r.witness, Some(vec![1, 3, 5]));
    let r = check("124/35", "13/2").unwrap();
    assert_eq!(r.witness, Some(vec![1, 3, 4]));
    let r = check("1/2", "12").unwrap();
    assert!(!r.contains && r.witness.is_none());
    assert!(matches!(check("12/2", "1"), Err(CliError::Invalid(_))));

    let o = bin(&["check", "124/35", "1/23", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["witness"], serde_json::json!([1, 3, 5]));
}

#[test]
fn dacp_examples() {
    let g = dacp_convert(&DacpDirection::ToGraph("13/2".into()), true).unwrap();
    assert_eq!(g, r#"{"n":3,"edges":[[2,1],[3,2]]}"#);
    let back = dacp_convert(&DacpDirection::FromGraph(g), true).unwrap();
    assert_eq!(back, "13/2");
    let empty = dacp_convert(&DacpDirection::FromGraph(r#"{"n":4,"edges":[]}"#.into()), false);
    assert_eq!(empty.unwrap(), "1234");
    let cycle =
        dacp_convert(&DacpDirection::FromGraph(r#"{"n":2,"edges":[[1,2],[2,1]]}"#.into()), false);
    assert!(matches!(cycle, Err(CliError::Invalid(_))));

    let o = bin(&["dacp", "from-graph", r#"{"n":2,"edges":[[1,2],[2,1]]}"#]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn conjecture_scan_for_size_three() {
    let mut config = ScanConfig::new(PatternSet::AllOfSize(3), 1, 12);
    config.out = Some(tempfile::NamedTempFile::new().unwrap().path().to_owned());
    let (outcome, report) = cmd_conjectures(&config).unwrap();
    assert_eq!(outcome.exit_code(), 0);
    let c1 = &report.verdicts[0];
    assert_eq!(c1.id, "C1");
    assert_eq!(c1.status, Status::Consistent);
    assert!(c1.counterexample.is_none());
}

#[test]
fn conjecture_scan_for_one_two_stays_at_zero() {
    let o = bin(&["conjectures", "--pattern", "1/2", "--n-to", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(column(&out, "pm").iter().all(|v| v == "0"));
    assert!(column(&out, "f_ratio").iter().skip(1).all(|v| v == "0"));
}

#[test]
fn conjecture_scan_for_123_far_out() {
    let o = bin(&[
        "conjectures",
        "--pattern",
        "123",
        "--n-from",
        "20",
        "--n-to",
        "500",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 481);
    for row in rows {
        let (n, gap) = (row["n"].as_f64().unwrap(), row["gap"].as_f64().unwrap());
        assert!(gap > 0.0 && gap < 1.0 / n.ln(), "n={n} gap={gap}");
    }
    let c6 = v["verdicts"].as_array().unwrap().iter().find(|x| x["id"] == "C6").unwrap();
    assert_eq!(c6["status"], "consistent");
}

#[test]
fn bounds_hold_at_desk_scale() {
    let o = bin(&["bounds", "--all-k", "4", "--n-to", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(column(&stdout(&o), "holds").iter().all(|v| v == "true"));

    let o = bin(&["bounds", "--pattern", "13/2", "--n-to", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["count", "--pattern", "1/1", "--n-to", "3"]).status.code(), Some(1));
    assert_eq!(bin(&["count", "--n-to", "3"]).status.code(), Some(1));
    assert_eq!(bin(&["count", "--pattern", "13/2", "--n-to", "30"]).status.code(), Some(3));
    assert_eq!(bin(&["count", "--all-k", "9", "--n-to", "3"]).status.code(), Some(3));
    assert_eq!(
        bin(&["count", "--pattern", "12", "--n-to", "3", "--oracle", "--oracle-ceiling", "13"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bin(&["count", "--pattern", "12", "--n-to", "11", "--oracle"]).status.code(),
        Some(3)
    );
    assert_eq!(bin(&["permeability", "1234", "12/34", "--oracle"]).status.code(), Some(0));
}

#[test]
fn block_patterns_skip_the_enumeration_ceiling() {
    let o = bin(&[
        "count",
        "--pattern",
        "1234",
        "--pattern",
        "1/2/3",
        "--n-from",
        "40",
        "--n-to",
        "40",
    ]);
    assert!(o.status.success());
    let counts = column(&stdout(&o), "count");
    // 1/2/3 avoiders have at most two blocks: S(40,1) + S(40,2) = 2^39
    assert_eq!(counts[1], (1u64 << 39).to_string());
}

#[test]
fn oracle_and_fast_paths_agree() {
    let fast = bin(&["count", "--pattern", "13/24", "--n-to", "8"]);
    let slow = bin(&["count", "--pattern", "13/24", "--n-to", "8", "--oracle"]);
    assert_eq!(stdout(&fast), stdout(&slow));
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let args = ["count", "--all-k", "3", "--n-to", "9", "--workers", "2"];
    let a = bin(&args);
    let b = bin(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

fn run_count(cache: Option<&Path>) -> (String, usize) {
    let out = tempfile::NamedTempFile::new().unwrap();
    let mut config = ScanConfig::new(PatternSet::AllOfSize(3), 1, 9);
    config.cache = cache.map(Path::to_owned);
    config.out = Some(out.path().to_owned());
    let outcome = cmd_count(&config).unwrap();
    let computed: usize = outcome.notes[0].split(' ').next().unwrap().parse().unwrap();
    (std::fs::read_to_string(out.path()).unwrap(), computed)
}

#[test]
fn cache_is_coherent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("counts.jsonl");
    let (first, computed) = run_count(Some(&cache));
    assert_eq!(computed, 45);
    let (second, recomputed) = run_count(Some(&cache));
    assert_eq!(recomputed, 0);
    let (uncached, _) = run_count(None);
    assert_eq!(first, second);
    assert_eq!(first, uncached);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 45);
}

#[test]
fn cache_via_environment_and_no_cache_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env.jsonl");
    let run = |extra: &[&str]| {
        let mut args = vec!["count", "--pattern", "12/3", "--n-to", "5"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_partavoid"))
            .args(&args)
            .env("PARTAVOID_CACHE", &cache)
            .output()
            .unwrap()
    };
    let o = run(&["--no-cache"]);
    assert!(o.status.success());
    assert!(!cache.exists());
    let o = run(&[]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("5 computed, 0 from cache"));
    let o = run(&[]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 computed, 5 from cache"));
}

#[test]
fn counter_prefers_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ScanConfig::new(PatternSet::Explicit(vec![p("12/3")]), 1, 6);
    config.cache = Some(dir.path().join("c.jsonl"));
    let mut counter = Counter::from_config(&config).unwrap();
    let a = counter.count(&p("12/3"), 6).unwrap();
    let mut again = Counter::from_config(&config).unwrap();
    assert_eq!(again.count(&p("12/3"), 6).unwrap(), a);
    assert_eq!(again.computed(), 0);
}

#[test]
fn uniform_listing() {
    let o = bin(&["uniform", "4", "2", "--list"]);
    assert_eq!(column(&stdout(&o), "partition"), ["13/24", "14/23"]);
    let o = bin(&["uniform", "6", "2", "--pattern", "123", "--pattern", "12/34"]);
    assert!(o.status.success());
    assert!(column(&stdout(&o), "observed_avoids").iter().all(|v| v == "true"));
    assert_eq!(bin(&["uniform", "5", "2"]).status.code(), Some(1));
}
