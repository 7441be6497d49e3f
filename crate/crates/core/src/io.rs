//! Text formats: semicolon edge lists (`FROM;TO;WEIGHT`), node lists (one
//! label per line) and `member;score` tables.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{build_network_with_members, GraphError, SocialNetwork};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse { line, reason: reason.into() }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), FormatError>> {
    reader.lines().enumerate().filter_map(|(i, l)| match l {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_owned())))
            }
        }
    })
}

/// Parse a finite real in either `1.5` or `1.5e-3` notation.
pub(crate) fn parse_real(s: &str, line: usize, what: &str) -> Result<f64, FormatError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{what} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} `{s}` is not finite")));
    }
    Ok(v)
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Vec<(String, String, f64)>, FormatError> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (no, line) = item?;
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 3 {
            return Err(parse_err(no, format!("expected 3 `;`-separated fields, got {}", fields.len())));
        }
        let w = parse_real(fields[2], no, "weight")?;
        out.push((fields[0].trim().to_owned(), fields[1].trim().to_owned(), w));
    }
    Ok(out)
}

pub fn read_node_list<R: BufRead>(reader: R) -> Result<Vec<String>, FormatError> {
    data_lines(reader).map(|r| r.map(|(_, l)| l)).collect()
}

/// Rows of `member;value[;...]`, returning the first two columns.
pub fn read_scores<R: BufRead>(reader: R) -> Result<Vec<(String, f64)>, FormatError> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (no, line) = item?;
        let mut fields = line.split(';');
        let member = fields.next().unwrap_or_default().trim().to_owned();
        let value = fields
            .next()
            .ok_or_else(|| parse_err(no, "expected `member;score`"))?;
        // Tolerate a header row.
        if no == 1 && value.trim().parse::<f64>().is_err() {
            continue;
        }
        out.push((member, parse_real(value, no, "score")?));
    }
    Ok(out)
}

pub fn write_edge_list<W: Write>(net: &SocialNetwork, mut w: W) -> io::Result<()> {
    for e in net.edges() {
        writeln!(w, "{};{};{}", net.label(e.from), net.label(e.to), e.weight)?;
    }
    Ok(())
}

pub fn write_node_list<W: Write, S: AsRef<str>>(labels: &[S], mut w: W) -> io::Result<()> {
    for l in labels {
        writeln!(w, "{}", l.as_ref())?;
    }
    Ok(())
}

pub fn open(path: &Path) -> Result<BufReader<File>, FormatError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| FormatError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Load a node list plus edge list. Every edge endpoint must be listed.
pub fn load_network(nodes: &Path, edges: &Path) -> Result<SocialNetwork, FormatError> {
    let members = read_node_list(open(nodes)?)?;
    let edge_rows = read_edge_list(open(edges)?)?;
    Ok(build_network_with_members(members, edge_rows)?)
}

pub fn save_network(net: &SocialNetwork, nodes: &Path, edges: &Path) -> io::Result<()> {
    let mut w = create(nodes)?;
    write_node_list(net.labels(), &mut w)?;
    w.flush()?;
    let mut w = create(edges)?;
    write_edge_list(net, &mut w)?;
    w.flush()
}

/// Decimal rendering with at most `digits` significant digits, trailing zeros
/// trimmed (`0.75`, `1`).
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_parses() {
        let text = "A;B;0.5\n\nA;C;0.5\nB;A;1\n";
        let rows = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1], ("A".into(), "C".into(), 0.5));
    }

    #[test]
    fn edge_list_errors_carry_line() {
        let err = read_edge_list("A;B;1\nA;B\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }));
        let err = read_edge_list("A;B;x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 1, .. }));
    }

    #[test]
    fn scores_skip_header() {
        let rows = read_scores("member;sp;rank\nA;1.5;1\nB;0.5;2\n".as_bytes()).unwrap();
        assert_eq!(rows, vec![("A".into(), 1.5), ("B".into(), 0.5)]);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.75, 12), "0.75");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_significant(0.0123456789012345, 12), "0.0123456789012");
    }

    #[test]
    fn round_trip_network() {
        let net = crate::graph::build_network([("A", "B", 0.1 + 0.2), ("B", "A", 1.0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let again = crate::graph::build_network(read_edge_list(buf.as_slice()).unwrap()).unwrap();
        assert_eq!(net, again);
    }
}
