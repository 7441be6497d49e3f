//! Call-detail-record ingestion.
//!
//! Records are `caller,receiver,YYMMDD,HHMMSS,duration_s`. The cleaning
//! pipeline is parse, drop calls shorter than the minimum duration, keep only
//! calls whose receiver is also a caller (the subscriber set), then aggregate
//! per user and per ordered pair. Memory stays proportional to the number of
//! distinct users and pairs.

use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveTime};
use thiserror::Error;

use crate::io::{create, format_significant};

#[derive(Debug, Error)]
pub enum CdrError {
    #[error("line {line_no}: {reason}")]
    Malformed { line_no: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("no connections to emit")]
    EmptyConnections,
    #[error("member `{0}` has zero total activity for the requested weight kind")]
    ZeroDenominator(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub caller: String,
    pub receiver: String,
    pub date: NaiveDate,
    pub time: NaiveTime,
    pub duration_s: u64,
}

fn malformed(line_no: usize, reason: impl Into<String>) -> CdrError {
    CdrError::Malformed { line_no, reason: reason.into() }
}

fn two_digits(s: &str, at: usize) -> u32 {
    s[at..at + 2].parse().unwrap_or(u32::MAX)
}

pub fn parse_cdr_line(line: &str, line_no: usize) -> Result<CallRecord, CdrError> {
    let fields: Vec<&str> = line.trim().split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(malformed(line_no, format!("expected 5 fields, found {}", fields.len())));
    }
    let (caller, receiver) = (fields[0], fields[1]);
    if caller.is_empty() || receiver.is_empty() {
        return Err(malformed(line_no, "empty caller or receiver"));
    }
    let digits = |s: &str| s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(fields[2]) {
        return Err(malformed(line_no, format!("date `{}` is not YYMMDD", fields[2])));
    }
    if !digits(fields[3]) {
        return Err(malformed(line_no, format!("time `{}` is not HHMMSS", fields[3])));
    }
    let d = fields[2];
    let date = NaiveDate::from_ymd_opt(2000 + two_digits(d, 0) as i32, two_digits(d, 2), two_digits(d, 4))
        .ok_or_else(|| malformed(line_no, format!("invalid date `{d}`")))?;
    let t = fields[3];
    let time = NaiveTime::from_hms_opt(two_digits(t, 0), two_digits(t, 2), two_digits(t, 4))
        .ok_or_else(|| malformed(line_no, format!("invalid time `{t}`")))?;
    let duration_s = fields[4]
        .parse::<u64>()
        .map_err(|_| malformed(line_no, format!("duration `{}` is not a non-negative integer", fields[4])))?;
    Ok(CallRecord {
        caller: caller.to_owned(),
        receiver: receiver.to_owned(),
        date,
        time,
        duration_s,
    })
}

/// Keep records lasting at least `min_duration_s` seconds, in order.
pub fn filter_short_calls<I>(records: I, min_duration_s: u64) -> impl Iterator<Item = CallRecord>
where
    I: IntoIterator<Item = CallRecord>,
{
    records.into_iter().filter(move |r| r.duration_s >= min_duration_s)
}

/// Labels that appear as caller.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubscriberSet(HashSet<String>);

impl SubscriberSet {
    pub fn from_records<'a, I: IntoIterator<Item = &'a CallRecord>>(records: I) -> Self {
        let mut set = SubscriberSet::default();
        for r in records {
            set.insert(&r.caller);
        }
        set
    }

    pub fn insert(&mut self, label: &str) {
        if !self.0.contains(label) {
            self.0.insert(label.to_owned());
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Second pass of the subscriber restriction.
pub fn restrict_with<'s, I>(records: I, subscribers: &'s SubscriberSet) -> impl Iterator<Item = CallRecord> + 's
where
    I: IntoIterator<Item = CallRecord>,
    I::IntoIter: 's,
{
    records.into_iter().filter(move |r| subscribers.contains(&r.receiver))
}

/// Two-pass restriction on an in-memory batch.
pub fn restrict_to_subscribers(records: Vec<CallRecord>) -> Vec<CallRecord> {
    let subscribers = SubscriberSet::from_records(&records);
    restrict_with(records, &subscribers).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserStats {
    pub label: String,
    pub dialled_calls: u64,
    pub received_calls: u64,
    pub outgoing_duration_s: u64,
    pub incoming_duration_s: u64,
    pub distinct_callees: u64,
    pub distinct_callers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionStats {
    pub a: String,
    pub b: String,
    pub calls: u64,
    pub duration_s: u64,
}

/// Mergeable partial aggregate.
#[derive(Debug, Clone, Default)]
pub struct Aggregator {
    users: HashMap<String, UserStats>,
    pairs: HashMap<(String, String), (u64, u64)>,
}

impl Aggregator {
    fn user(&mut self, label: &str) -> &mut UserStats {
        if !self.users.contains_key(label) {
            self.users.insert(
                label.to_owned(),
                UserStats { label: label.to_owned(), ..Default::default() },
            );
        }
        self.users.get_mut(label).unwrap()
    }

    pub fn push(&mut self, r: &CallRecord) {
        let caller = self.user(&r.caller);
        caller.dialled_calls += 1;
        caller.outgoing_duration_s += r.duration_s;
        let receiver = self.user(&r.receiver);
        receiver.received_calls += 1;
        receiver.incoming_duration_s += r.duration_s;
        let pair = self.pairs.entry((r.caller.clone(), r.receiver.clone())).or_insert((0, 0));
        pair.0 += 1;
        pair.1 += r.duration_s;
    }

    /// Associative merge of two partial aggregates.
    pub fn merge(&mut self, other: Aggregator) {
        for (label, s) in other.users {
            let u = self.user(&label);
            u.dialled_calls += s.dialled_calls;
            u.received_calls += s.received_calls;
            u.outgoing_duration_s += s.outgoing_duration_s;
            u.incoming_duration_s += s.incoming_duration_s;
        }
        for (k, (c, d)) in other.pairs {
            let p = self.pairs.entry(k).or_insert((0, 0));
            p.0 += c;
            p.1 += d;
        }
    }

    /// Sorted user and connection tables.
    pub fn finish(self) -> (Vec<UserStats>, Vec<ConnectionStats>) {
        let mut users = self.users;
        for (a, b) in self.pairs.keys() {
            users.get_mut(a).unwrap().distinct_callees += 1;
            users.get_mut(b).unwrap().distinct_callers += 1;
        }
        let mut users: Vec<UserStats> = users.into_values().collect();
        users.sort_by(|x, y| x.label.cmp(&y.label));
        let mut conns: Vec<ConnectionStats> = self
            .pairs
            .into_iter()
            .map(|((a, b), (calls, duration_s))| ConnectionStats { a, b, calls, duration_s })
            .collect();
        conns.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
        (users, conns)
    }
}

pub fn aggregate<I>(records: I) -> (Vec<UserStats>, Vec<ConnectionStats>)
where
    I: IntoIterator<Item = CallRecord>,
{
    let mut agg = Aggregator::default();
    for r in records {
        agg.push(&r);
    }
    agg.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `N(A -> B) / N(A)`
    Count,
    /// `T(A -> B) / T(A)`
    Duration,
}

impl EdgeKind {
    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Count => "count",
            EdgeKind::Duration => "duration",
        }
    }
}

/// Normalised `(A, B, w)` rows, sorted by `(A, B)`.
pub fn commitment_rows(connections: &[ConnectionStats], kind: EdgeKind) -> Result<Vec<(String, String, f64)>, CdrError> {
    let value = |c: &ConnectionStats| match kind {
        EdgeKind::Count => c.calls,
        EdgeKind::Duration => c.duration_s,
    };
    let mut totals: HashMap<&str, u64> = HashMap::new();
    for c in connections {
        *totals.entry(c.a.as_str()).or_insert(0) += value(c);
    }
    let mut rows = Vec::with_capacity(connections.len());
    for c in connections {
        let total = totals[c.a.as_str()];
        if total == 0 {
            return Err(CdrError::ZeroDenominator(c.a.clone()));
        }
        rows.push((c.a.clone(), c.b.clone(), value(c) as f64 / total as f64));
    }
    rows.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitSummary {
    pub nodes: usize,
    pub edges: usize,
}

/// Write the node list and `A;B;w` edge list. Weights carry 12 significant
/// digits.
pub fn write_edge_files<N: Write, E: Write>(
    connections: &[ConnectionStats],
    kind: EdgeKind,
    mut nodes: N,
    mut edges: E,
) -> Result<EmitSummary, CdrError> {
    if connections.is_empty() {
        return Err(CdrError::EmptyConnections);
    }
    let mut labels: Vec<&str> = connections
        .iter()
        .flat_map(|c| [c.a.as_str(), c.b.as_str()])
        .collect();
    labels.sort_unstable();
    labels.dedup();
    for l in &labels {
        writeln!(nodes, "{l}")?;
    }
    let rows = commitment_rows(connections, kind)?;
    for (a, b, w) in &rows {
        writeln!(edges, "{a};{b};{}", format_significant(*w, 12))?;
    }
    nodes.flush()?;
    edges.flush()?;
    Ok(EmitSummary { nodes: labels.len(), edges: rows.len() })
}

pub fn emit_edge_files(
    connections: &[ConnectionStats],
    kind: EdgeKind,
    node_path: &Path,
    edge_path: &Path,
) -> Result<EmitSummary, CdrError> {
    write_edge_files(connections, kind, create(node_path)?, create(edge_path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    pub min_duration_s: u64,
    /// Skip and count malformed lines instead of aborting.
    pub lenient: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { min_duration_s: 3, lenient: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub total_calls: u64,
    pub malformed_lines: u64,
    pub zero_second_calls: u64,
    pub callers: u64,
    pub receivers: u64,
    pub distinct_pairs: u64,
    pub both_caller_and_receiver: u64,
    pub short_calls_removed: u64,
    pub subscribers: u64,
    pub non_subscriber_calls_removed: u64,
    pub retained_calls: u64,
    pub users: u64,
    pub connections: u64,
}

impl IngestSummary {
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let rows: [(&str, u64); 13] = [
            ("total_calls", self.total_calls),
            ("malformed_lines", self.malformed_lines),
            ("zero_second_calls", self.zero_second_calls),
            ("callers", self.callers),
            ("receivers", self.receivers),
            ("distinct_pairs", self.distinct_pairs),
            ("both_caller_and_receiver", self.both_caller_and_receiver),
            ("short_calls_removed", self.short_calls_removed),
            ("subscribers", self.subscribers),
            ("non_subscriber_calls_removed", self.non_subscriber_calls_removed),
            ("retained_calls", self.retained_calls),
            ("users", self.users),
            ("connections", self.connections),
        ];
        for (k, v) in rows {
            writeln!(w, "{k}: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOutcome {
    pub users: Vec<UserStats>,
    pub connections: Vec<ConnectionStats>,
    pub summary: IngestSummary,
}

/// Parsed records of one pass; malformed lines either abort or are counted.
fn parse_pass<'a, R: BufRead + 'a>(
    reader: R,
    lenient: bool,
    malformed: &'a mut u64,
) -> impl Iterator<Item = Result<CallRecord, CdrError>> + 'a {
    reader.lines().enumerate().filter_map(move |(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        if line.trim().is_empty() {
            return None;
        }
        match parse_cdr_line(&line, i + 1) {
            Ok(r) => Some(Ok(r)),
            Err(_) if lenient => {
                *malformed += 1;
                None
            }
            Err(e) => Some(Err(e)),
        }
    })
}

/// Run the whole cleaning pipeline with two passes over the source.
pub fn ingest<F, R>(open: F, opts: IngestOptions) -> Result<IngestOutcome, CdrError>
where
    F: Fn() -> io::Result<R>,
    R: BufRead,
{
    let mut summary = IngestSummary::default();
    let mut callers = HashSet::new();
    let mut receivers = HashSet::new();
    let mut pairs = HashSet::new();
    let mut subscribers = SubscriberSet::default();

    let mut malformed = 0;
    for r in parse_pass(open()?, opts.lenient, &mut malformed) {
        let r = r?;
        summary.total_calls += 1;
        if r.duration_s == 0 {
            summary.zero_second_calls += 1;
        }
        if r.duration_s < opts.min_duration_s {
            summary.short_calls_removed += 1;
        } else {
            subscribers.insert(&r.caller);
        }
        if !callers.contains(&r.caller) {
            callers.insert(r.caller.clone());
        }
        if !receivers.contains(&r.receiver) {
            receivers.insert(r.receiver.clone());
        }
        pairs.insert((r.caller, r.receiver));
    }
    summary.malformed_lines = malformed;
    summary.callers = callers.len() as u64;
    summary.receivers = receivers.len() as u64;
    summary.distinct_pairs = pairs.len() as u64;
    summary.both_caller_and_receiver = callers.intersection(&receivers).count() as u64;
    summary.subscribers = subscribers.len() as u64;
    drop((callers, receivers, pairs));

    let mut agg = Aggregator::default();
    let mut ignored = 0;
    for r in parse_pass(open()?, opts.lenient, &mut ignored) {
        let r = r?;
        if r.duration_s < opts.min_duration_s {
            continue;
        }
        if subscribers.contains(&r.receiver) {
            summary.retained_calls += 1;
            agg.push(&r);
        } else {
            summary.non_subscriber_calls_removed += 1;
        }
    }
    let (users, connections) = agg.finish();
    summary.users = users.len() as u64;
    summary.connections = connections.len() as u64;
    Ok(IngestOutcome { users, connections, summary })
}

pub fn ingest_file(path: &Path, opts: IngestOptions) -> Result<IngestOutcome, CdrError> {
    ingest(
        || {
            std::fs::File::open(path)
                .map(io::BufReader::new)
                .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        },
        opts,
    )
}

/// Write every ingest artefact into `dir`: `nodes.txt`, `edges_count.txt`,
/// `edges_duration.txt`, `users.csv`, `connections.csv`, `summary.txt`.
pub fn write_outputs(outcome: &IngestOutcome, dir: &Path) -> Result<(), CdrError> {
    std::fs::create_dir_all(dir)?;
    emit_edge_files(&outcome.connections, EdgeKind::Count, &dir.join("nodes.txt"), &dir.join("edges_count.txt"))?;
    emit_edge_files(&outcome.connections, EdgeKind::Duration, &dir.join("nodes.txt"), &dir.join("edges_duration.txt"))?;

    let mut w = create(&dir.join("users.csv"))?;
    writeln!(w, "# label;dialled_calls;received_calls;outgoing_duration_s;incoming_duration_s;distinct_callees;distinct_callers")?;
    for u in &outcome.users {
        writeln!(
            w,
            "{};{};{};{};{};{};{}",
            u.label,
            u.dialled_calls,
            u.received_calls,
            u.outgoing_duration_s,
            u.incoming_duration_s,
            u.distinct_callees,
            u.distinct_callers
        )?;
    }
    w.flush()?;

    let mut w = create(&dir.join("connections.csv"))?;
    writeln!(w, "# a;b;calls;duration_s")?;
    for c in &outcome.connections {
        writeln!(w, "{};{};{};{}", c.a, c.b, c.calls, c.duration_s)?;
    }
    w.flush()?;

    let mut w = create(&dir.join("summary.txt"))?;
    outcome.summary.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}
