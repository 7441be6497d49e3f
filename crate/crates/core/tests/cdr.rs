use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use spinrank::cdr::{
    aggregate, filter_short_calls, ingest_file, parse_cdr_line, restrict_to_subscribers, write_outputs, CdrError,
    IngestOptions,
};
use spinrank::io::{read_edge_list, read_node_list};
use spinrank::{commitment_network, validate_commitment, ActivityMatrix, ROW_SUM_TOLERANCE};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(str::to_owned)
        .collect()
}

const LENIENT: IngestOptions = IngestOptions { min_duration_s: 3, lenient: true };

#[test]
fn strict_ingest_stops_at_malformed_line() {
    match ingest_file(&fixture("cdr_50.txt"), IngestOptions::default()) {
        Err(CdrError::Malformed { line_no, .. }) => assert_eq!(line_no, 24),
        other => panic!("expected a malformed-line error, got {other:?}"),
    }
}

#[test]
fn fixture_tables_match_hand_computed() {
    let out = tempfile::tempdir().unwrap();
    let outcome = ingest_file(&fixture("cdr_50.txt"), LENIENT).unwrap();
    write_outputs(&outcome, out.path()).unwrap();

    assert_eq!(data_lines(&out.path().join("users.csv")), data_lines(&fixture("cdr_50_users.csv")));
    assert_eq!(data_lines(&out.path().join("connections.csv")), data_lines(&fixture("cdr_50_connections.csv")));
    assert_eq!(data_lines(&out.path().join("summary.txt")), data_lines(&fixture("cdr_50_summary.txt")));
}

#[test]
fn emitted_edges_are_normalised_shares() {
    let out = tempfile::tempdir().unwrap();
    let outcome = ingest_file(&fixture("cdr_50.txt"), LENIENT).unwrap();
    write_outputs(&outcome, out.path()).unwrap();

    let mut calls: HashMap<(String, String), (f64, f64)> = HashMap::new();
    let mut totals: HashMap<String, (f64, f64)> = HashMap::new();
    for row in data_lines(&fixture("cdr_50_connections.csv")) {
        let f: Vec<&str> = row.split(';').collect();
        let (n, t): (f64, f64) = (f[2].parse().unwrap(), f[3].parse().unwrap());
        calls.insert((f[0].into(), f[1].into()), (n, t));
        let e = totals.entry(f[0].into()).or_default();
        e.0 += n;
        e.1 += t;
    }

    let nodes = read_node_list(fs::File::open(out.path().join("nodes.txt")).map(std::io::BufReader::new).unwrap()).unwrap();
    assert_eq!(nodes.len(), 8);
    for (file, pick) in [("edges_count.txt", 0), ("edges_duration.txt", 1)] {
        let rows = read_edge_list(std::io::BufReader::new(fs::File::open(out.path().join(file)).unwrap())).unwrap();
        assert_eq!(rows.len(), calls.len());
        let mut sums: HashMap<&str, f64> = HashMap::new();
        for (a, b, w) in &rows {
            assert_ne!(a, b);
            assert!((0.0..=1.0).contains(w));
            let (n, t) = calls[&(a.clone(), b.clone())];
            let want = if pick == 0 { n / totals[a].0 } else { t / totals[a].1 };
            assert!((w - want).abs() <= 1e-11 * want, "{file} {a}->{b}");
            *sums.entry(a).or_default() += w;
        }
        assert!(sums.values().all(|s| (s - 1.0).abs() <= ROW_SUM_TOLERANCE));
        let net = commitment_network(&ActivityMatrix::from_labelled(rows).unwrap()).unwrap();
        assert!(validate_commitment(&net, ROW_SUM_TOLERANCE).is_clean());
    }
}

#[test]
fn in_memory_pipeline_matches_streaming() {
    let text = fs::read_to_string(fixture("cdr_50.txt")).unwrap();
    let records: Vec<_> = text
        .lines()
        .enumerate()
        .filter_map(|(i, l)| parse_cdr_line(l, i + 1).ok())
        .collect();
    assert_eq!(records.len(), 49);
    let kept: Vec<_> = filter_short_calls(records, 3).collect();
    let (users, conns) = aggregate(restrict_to_subscribers(kept));
    let streamed = ingest_file(&fixture("cdr_50.txt"), LENIENT).unwrap();
    assert_eq!(users, streamed.users);
    assert_eq!(conns, streamed.connections);
}

#[test]
fn record_parsing() {
    let r = parse_cdr_line("1000008248,16505109637,050827,103157,33", 1).unwrap();
    assert_eq!(r.date.to_string(), "2005-08-27");
    assert_eq!(r.time.to_string(), "10:31:57");
    assert_eq!(r.duration_s, 33);
    for bad in [
        "a,b,050827,103157",
        "a,b,0508x7,103157,1",
        "a,b,051327,103157,1",
        "a,b,050827,256157,1",
        "a,b,050827,103157,-1",
        ",b,050827,103157,1",
    ] {
        assert!(matches!(parse_cdr_line(bad, 7), Err(CdrError::Malformed { line_no: 7, .. })), "{bad}");
    }
}
