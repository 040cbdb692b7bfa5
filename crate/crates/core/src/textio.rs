//! Plain-text hypergraph format: a header line `k n m` followed by `m` lines
//! of `k` vertex ids. Blank lines and `#` comments are ignored.

use std::fmt::Write;

use crate::{Error, Hypergraph, Result};

/// Parses the text format. With `multiset` set, repeated edges are accepted
/// and collapse; otherwise they are rejected.
pub fn parse(text: &str, multiset: bool) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header `k n m`".into(),
    })?;
    let nums = parse_nums(hline, header)?;
    let [k, n, m] = nums[..] else {
        return Err(Error::Parse { line: hline, msg: "header must be `k n m`".into() });
    };
    let (k, n, m) = (k as usize, n as usize, m as usize);
    if k == 0 {
        return Err(Error::Parse { line: hline, msg: "k must be positive".into() });
    }
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines.by_ref() {
        if edges.len() == m {
            return Err(Error::Parse { line, msg: format!("more than {m} edge lines") });
        }
        let e = parse_nums(line, l)?;
        edges.push(e);
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    if multiset {
        Hypergraph::new(k, n, edges)
    } else {
        Hypergraph::new_strict(k, n, edges)
    }
}

fn parse_nums(line: usize, l: &str) -> Result<Vec<u32>> {
    l.split_whitespace()
        .map(|t| {
            t.parse::<u32>().map_err(|e| Error::Parse { line, msg: format!("`{t}`: {e}") })
        })
        .collect()
}

pub fn write(f: &Hypergraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", f.k(), f.n(), f.len());
    for e in f.edges() {
        let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", parts.join(" "));
    }
    s
}

pub fn read_file(path: &std::path::Path, multiset: bool) -> Result<Hypergraph> {
    parse(&std::fs::read_to_string(path)?, multiset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = parse("3 5 2\n0 1 2\n4 3 2\n", false).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(parse(&write(&f), false).unwrap(), f);
    }

    #[test]
    fn duplicates() {
        let text = "2 3 2\n0 1\n1 0\n";
        assert!(matches!(parse(text, false), Err(Error::DuplicateEdge(_))));
        assert_eq!(parse(text, true).unwrap().len(), 1);
    }

    #[test]
    fn bad_inputs() {
        assert!(parse("", false).is_err());
        assert!(parse("2 3 2\n0 1\n", false).is_err());
        assert!(parse("2 3 1\n0 x\n", false).is_err());
        assert!(parse("2 3 1\n0 1 2\n", false).is_err());
        assert!(parse("# comment\n2 3 1\n0 2 # tail\n", false).is_ok());
    }
}
