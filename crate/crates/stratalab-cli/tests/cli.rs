//! End-to-end runs of the `stratalab` binary.

use std::path::Path;
use std::process::{Command, Output};

use stratalab::euler::CalibratedCorrections;
use stratalab_cli::cache::{parse_record, CacheRecord, CACHE_ENV};
use stratalab_cli::output::{EulerRecord, ExceptionalRecord, TableRow, WitnessRecord};

fn run_with_cache(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratalab"))
        .args(args)
        .env(CACHE_ENV, cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_with_cache(&dir.path().join("cache.jsonl"), args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

const SINGLE_POLE: [&str; 10] = [
    "2,-2", "3,-3", "4,-4", "5,-5", "6,-6", "7,-7", "8,-8", "9,-9", "10,-10", "12,-12",
];

const MULTI_POLE: [&str; 15] = [
    "4,-2,-2",
    "5,-2,-3",
    "6,-2,-4",
    "6,-3,-3",
    "7,-2,-5",
    "7,-3,-4",
    "8,-2,-6",
    "8,-3,-5",
    "8,-4,-4",
    "6,-2,-2,-2",
    "7,-2,-2,-3",
    "8,-2,-2,-4",
    "8,-2,-3,-3",
    "8,-2,-2,-2,-2",
    "10,-2,-2,-2,-2,-2",
];

fn expected_exceptional() -> Vec<String> {
    SINGLE_POLE
        .iter()
        .chain(MULTI_POLE.iter())
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn euler_pinned_values() {
    let text = ok(&["euler", "8,-2,-2,-2,-2"]);
    assert!(
        text.lines()
            .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["chi_compact", "18"]),
        "{text}"
    );

    let json = ok(&["euler", "4,-2,-2", "--format", "json"]);
    let record: EulerRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_value(&record.chi_compact).unwrap(), "4");
    assert_eq!(record.provider_version, "calibrated-1");

    let csv = ok(&["euler", "11,-2,-2,-2,-2,-3", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("\"11,-2,-2,-2,-2,-3\",exact,calibrated-1,"));
    assert!(csv.contains(",-240,-240,"), "{csv}");
}

#[test]
fn euler_bracket_contains_exact() {
    let exact: EulerRecord = serde_json::from_str(&ok(&["euler", "8,-4,-4", "--format", "json"])).unwrap();
    let bracket: EulerRecord =
        serde_json::from_str(&ok(&["euler", "8,-4,-4", "--format", "json", "--mode", "bracket"])).unwrap();
    let value: stratalab::euler::Rational = match exact.chi_compact {
        stratalab_cli::output::ChiJson::Exact(x) => x.parse().unwrap(),
        other => panic!("{other:?}"),
    };
    match bracket.chi_compact {
        stratalab_cli::output::ChiJson::Bracket { lo, hi } => {
            assert!(lo.parse::<stratalab::euler::Rational>().unwrap() <= value);
            assert!(value <= hi.parse().unwrap());
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(bracket.corrections.eps0, None);
}

#[test]
fn invalid_signatures_exit_2() {
    for sig in ["4,-1,-3", "5,-2,-2", "x", "4,2,2", "2,-2"] {
        let out = run(&["euler", sig]);
        assert_eq!(out.status.code(), Some(2), "{sig}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(code(&["components", "0,-2"]), 2);
    assert_eq!(code(&["applicability", "--mu", "9,-1"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn exceptional_list() {
    let text = ok(&["exceptional"]);
    assert_eq!(
        text.lines().map(str::to_string).collect::<Vec<_>>(),
        expected_exceptional()
    );
}

#[test]
fn exceptional_bracket_adds_unresolved_section() {
    let exact = ok(&["exceptional"]);
    let bracket = ok(&["exceptional", "--mode", "bracket"]);
    let (head, tail) = bracket.split_once("unresolved (").expect("unresolved section");
    assert_eq!(head, exact);
    let listed: Vec<&str> = tail.lines().skip(1).map(str::trim).collect();
    assert_eq!(tail.lines().next().unwrap(), format!("{}):", listed.len()));
    // two- and three-pole members depend on the corrections, so the bracket lists them
    for sig in MULTI_POLE.iter().filter(|s| s.matches(',').count() <= 3) {
        assert!(listed.contains(sig), "{sig}");
    }

    let json: ExceptionalRecord =
        serde_json::from_str(&ok(&["exceptional", "--mode", "bracket", "--format", "json"])).unwrap();
    assert_eq!(json.exceptional, expected_exceptional());
    assert_eq!(json.unresolved.unwrap(), listed);
}

#[test]
fn exceptional_csv_one_row_per_signature() {
    let csv = ok(&["exceptional", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("signature,p,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    for (row, sig) in rows.iter().zip(expected_exceptional()) {
        let p = sig.matches(',').count();
        assert_eq!(*row, format!("\"{sig}\",{p},exceptional"));
    }
}

#[test]
fn exceptional_json_round_trips() {
    let text = ok(&["exceptional", "--format", "json"]);
    let record: ExceptionalRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(record.exceptional, expected_exceptional());
    assert!(record.unresolved.is_none());
    assert_eq!(serde_json::to_string_pretty(&record).unwrap() + "\n", text);
}

#[test]
fn output_is_independent_of_jobs_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("sub").join("cache.jsonl");
    let reference = stdout(&run_with_cache(&cache, &["exceptional", "--no-cache", "--jobs", "1"]));
    assert!(!cache.exists(), "--no-cache must not write");
    for jobs in ["1", "2", "8", "0"] {
        for extra in [None, Some("--no-cache")] {
            let mut args = vec!["exceptional", "--format", "text", "--jobs", jobs];
            args.extend(extra);
            let out = run_with_cache(&cache, &args);
            assert!(out.status.success());
            assert_eq!(stdout(&out), reference, "jobs {jobs} {extra:?}");
        }
    }
    assert!(cache.exists());
    let table_cached = stdout(&run_with_cache(&cache, &["table"]));
    let table_fresh = stdout(&run_with_cache(&cache, &["table", "--no-cache"]));
    assert_eq!(table_cached, table_fresh);
}

#[test]
fn cache_records_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    assert!(run_with_cache(&cache, &["exceptional"]).status.success());
    let text = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(text.lines().count(), 595);
    for line in text.lines() {
        let record = parse_record(line).unwrap();
        let again = CacheRecord::compute(&record.signature().unwrap(), &CalibratedCorrections).unwrap();
        assert_eq!(record, again);
    }
    // a second run reads everything and appends nothing
    assert!(run_with_cache(&cache, &["exceptional"]).status.success());
    assert_eq!(std::fs::read_to_string(&cache).unwrap(), text);
}

#[test]
fn corrupt_cache_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let reference = stdout(&run_with_cache(&cache, &["exceptional", "--no-cache"]));
    assert!(run_with_cache(&cache, &["exceptional"]).status.success());
    let mut text = std::fs::read_to_string(&cache).unwrap();
    // tamper with one record and truncate another line
    text = text.replacen("\"h0\":2,", "\"h0\":7,", 1);
    text.push_str("{\"key\":\"4,-2");
    std::fs::write(&cache, &text).unwrap();
    let out = run_with_cache(&cache, &["exceptional"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), reference);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.matches("warning:").count(), 2, "{stderr}");
}

#[test]
fn unresolved_provider_exits_4() {
    assert_eq!(code(&["exceptional", "--provider", "none"]), 4);
    assert_eq!(code(&["table", "--provider", "none"]), 4);
    assert_eq!(code(&["euler", "6,-3,-3", "--provider", "none"]), 4);
    assert_eq!(
        code(&["euler", "6,-3,-3", "--provider", "none", "--mode", "bracket"]),
        0
    );
    assert_eq!(code(&["euler", "8,-2,-2,-2,-2", "--provider", "none"]), 0);
}

const TABLE_TEXT: &str = "\
signature   chi  h0      ok
4,-2,-2     4    2=0+2
5,-2,-3     2    1=1+0
6,-2,-4     6    3=2+1
7,-2,-5     2    1=1+0
8,-2,-6     6    3=2+1
10,-2,-8    4    3=2+1   \u{2713}
12,-2,-10   2    3=2+1   \u{2713}
6,-3,-3     6    3=2+1   \u{22c6}
7,-3,-4     2    1=1+0
8,-3,-5     2    1=1+0
9,-3,-6     2    2=2+0   \u{2713}
8,-4,-4     8    4=2+2
";

#[test]
fn table_text_is_pinned() {
    assert_eq!(ok(&["table"]), TABLE_TEXT);
}

#[test]
fn table_formats_agree() {
    let json: Vec<TableRow> = serde_json::from_str(&ok(&["table", "--format", "json"])).unwrap();
    let csv_text = ok(&["table", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let csv_rows: Vec<TableRow> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(json, csv_rows);
    let text_rows: Vec<&str> = TABLE_TEXT.lines().skip(1).collect();
    assert_eq!(json.len(), text_rows.len());
    for (row, line) in json.iter().zip(text_rows) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[0], row.signature);
        assert_eq!(cells[1], row.chi);
        assert_eq!(cells[2], format!("{}={}+{}", row.h0, row.nonhyp, row.hyp));
        assert_eq!(cells.get(3) == Some(&"\u{2713}"), row.ok);
        assert_eq!(cells.get(3) == Some(&"\u{22c6}"), row.mark.as_deref() == Some("star"));
    }
}

#[test]
fn witness_commands() {
    let json = ok(&["witness", "--theorem", "h3", "--mu", "10", "--format", "json"]);
    let certs: Vec<WitnessRecord> = serde_json::from_str(&json).unwrap();
    assert!(!certs.is_empty());
    assert!(certs.iter().all(|c| c.valid && c.automorphisms == 1 && c.genus == 6));

    for (theorem, mu) in [("h4", "9,9"), ("h6", "14")] {
        let certs: Vec<WitnessRecord> =
            serde_json::from_str(&ok(&["witness", "--theorem", theorem, "--mu", mu, "--format", "json"])).unwrap();
        assert_eq!(certs.len(), 1);
        assert!(certs[0].valid && certs[0].ghost_trivial, "{theorem} {mu}");
        assert!(certs[0].levels.iter().all(|l| l.positive_genus));
    }

    let one = ok(&["witness", "--theorem", "h3", "--mu", "10", "--parts", "4,1"]);
    assert!(one.contains("valid          yes"), "{one}");

    let out = run(&["witness", "--theorem", "h6", "--mu", "12"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("13"));
    assert_eq!(code(&["witness", "--theorem", "h3", "--mu", "8"]), 3);
    assert_eq!(code(&["witness", "--theorem", "h4", "--mu", "10"]), 3);
    assert_eq!(code(&["witness", "--theorem", "h4", "--mu", "9,9", "--parts", "1"]), 2);
}

#[test]
fn witness_graphs_check_out() {
    let dir = tempfile::tempdir().unwrap();
    let certs: Vec<WitnessRecord> =
        serde_json::from_str(&ok(&["witness", "--theorem", "h6", "--mu", "14", "--format", "json"])).unwrap();
    let file = dir.path().join("g.txt");
    std::fs::write(&file, &certs[0].graph).unwrap();
    let report = ok(&["graph", file.to_str().unwrap()]);
    assert!(report.contains("automorphisms  1"), "{report}");
    assert!(report.contains("genus          8"), "{report}");

    std::fs::write(&file, "V 0 1 0\nV 0 1 0\n").unwrap();
    assert_eq!(code(&["graph", file.to_str().unwrap()]), 2);
    std::fs::write(&file, "V 0 1 0\nL 0 5 z1\n").unwrap();
    let out = run(&["graph", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("violation"));
}

#[test]
fn applicability_and_bound() {
    assert_eq!(ok(&["applicability", "--mu", "9,9"]), "H3,H4,H5\n");
    assert_eq!(ok(&["applicability", "--mu", "2"]), "\n");
    assert_eq!(ok(&["bound", "--mu", "8"]), "0\n");
    let b10: u64 = ok(&["bound", "--mu", "10"]).trim().parse().unwrap();
    let b40: u64 = ok(&["bound", "--mu", "40"]).trim().parse().unwrap();
    assert!(b10 >= 1 && b40 >= b10);
}

#[test]
fn partitions_command() {
    let text = ok(&["partitions", "10", "--list"]);
    assert!(text.contains("count            10\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with('(')).count(), 10);
    let csv = ok(&["partitions", "6", "--list", "--format", "csv"]);
    assert_eq!(csv, "n,partition\n6,(6)\n6,\"(5,1)\"\n6,\"(4,2)\"\n6,\"(3,2,1)\"\n");
    let json: serde_json::Value = serde_json::from_str(&ok(&["partitions", "100", "--format", "json"])).unwrap();
    assert_eq!(json["count"], "444793");
    assert_eq!(code(&["partitions", "1000", "--list"]), 2);
}

#[test]
fn components_command() {
    let text = ok(&["components", "6,-3,-3"]);
    assert!(text.contains("h0         3=2+1"));
    assert!(text.contains("mark: star"));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["components", "10,-2,-2,-2,-2,-2", "--format", "json"])).unwrap();
    assert_eq!(json["h0"], 25);
}

#[test]
fn unusable_cache_path_only_warns() {
    let dir = tempfile::tempdir().unwrap();
    let reference = stdout(&run_with_cache(&dir.path().join("c.jsonl"), &["table", "--no-cache"]));
    // a directory cannot be read or appended to as a cache file
    let out = run_with_cache(dir.path(), &["table"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), reference);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("warning: cache disabled"));
}
