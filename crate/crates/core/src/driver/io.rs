//! METIS graph files and one-PE-per-line mapping files.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Graph, Weight};
use crate::topology::PeId;

fn parse_error(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(token: &str, what: &str, path: &str, line: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_error(path, line, format!("expected {what}, found '{token}'")))
}

/// Parses METIS text. `origin` names the source in error messages.
///
/// Header `n m [fmt]` with `fmt` one of `0`, `1` (edge weights), `10` (node
/// weights), `11` (both). Node lines list 1-based neighbor ids; lines
/// starting with `%` are comments.
pub fn parse_metis_str(text: &str, origin: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('%'));
    let (header_line, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_error(origin, 1, "missing header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 4 {
        return Err(parse_error(origin, header_line, "header must be 'n m [fmt [ncon]]'"));
    }
    let n: usize = number(fields[0], "node count", origin, header_line)?;
    let m: usize = number(fields[1], "edge count", origin, header_line)?;
    let fmt = fields.get(2).copied().unwrap_or("0");
    let (node_weights, edge_weights) = match fmt {
        "0" | "00" | "000" => (false, false),
        "1" | "01" | "001" => (false, true),
        "10" | "010" => (true, false),
        "11" | "011" => (true, true),
        other => return Err(parse_error(origin, header_line, format!("unsupported format '{other}'"))),
    };
    if let Some(ncon) = fields.get(3) {
        if *ncon != "1" {
            return Err(parse_error(origin, header_line, "only one node weight per node is supported"));
        }
    }

    let mut xadj = Vec::with_capacity(n + 1);
    xadj.push(0);
    let mut adjncy = Vec::with_capacity(2 * m);
    let mut adjwgt: Vec<Weight> = Vec::with_capacity(2 * m);
    let mut vwgt: Vec<Weight> = Vec::with_capacity(n);
    let mut last_line = header_line;
    for v in 0..n {
        let (line_no, line) = lines.next().unwrap_or((last_line + 1, ""));
        last_line = line_no;
        let mut tokens = line.split_whitespace();
        if node_weights {
            let w: Weight = match tokens.next() {
                Some(t) => number(t, "node weight", origin, line_no)?,
                None => return Err(parse_error(origin, line_no, format!("node {} has no weight", v + 1))),
            };
            if w < 0 {
                return Err(parse_error(origin, line_no, "negative node weight"));
            }
            vwgt.push(w);
        } else {
            vwgt.push(1);
        }
        while let Some(t) = tokens.next() {
            let u: usize = number(t, "neighbor id", origin, line_no)?;
            if u == 0 || u > n {
                return Err(parse_error(origin, line_no, format!("neighbor id {u} outside 1..={n}")));
            }
            if u == v + 1 {
                return Err(parse_error(origin, line_no, format!("self-loop at node {u}")));
            }
            let w: Weight = if edge_weights {
                let t = tokens
                    .next()
                    .ok_or_else(|| parse_error(origin, line_no, format!("missing weight for edge to {u}")))?;
                number(t, "edge weight", origin, line_no)?
            } else {
                1
            };
            if w <= 0 {
                return Err(parse_error(origin, line_no, "edge weights must be positive"));
            }
            adjncy.push(u - 1);
            adjwgt.push(w);
        }
        xadj.push(adjncy.len());
    }
    if let Some((line_no, _)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(parse_error(origin, line_no, format!("more than {n} node lines")));
    }
    if adjncy.len() != 2 * m {
        return Err(parse_error(
            origin,
            header_line,
            format!("header declares {m} edges but the adjacency lists hold {} arcs", adjncy.len()),
        ));
    }
    Graph::from_csr(xadj, adjncy, adjwgt, vwgt).map_err(|e| parse_error(origin, header_line, e.to_string()))
}

/// Reads a METIS graph file.
pub fn parse_metis(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_metis_str(&text, &path.display().to_string())
}

/// METIS text for `graph`; weights are written only when not all one.
pub fn metis_string(graph: &Graph) -> String {
    let node_weights = graph.node_weights().iter().any(|&w| w != 1);
    let edge_weights = (0..graph.n()).any(|v| graph.adjacent_weights(v).iter().any(|&w| w != 1));
    let mut out = String::new();
    let fmt = match (node_weights, edge_weights) {
        (false, false) => "",
        (false, true) => " 1",
        (true, false) => " 10",
        (true, true) => " 11",
    };
    let _ = writeln!(out, "{} {}{}", graph.n(), graph.m(), fmt);
    for v in 0..graph.n() {
        let mut first = true;
        let mut sep = |out: &mut String| {
            if !first {
                out.push(' ');
            }
            first = false;
        };
        if node_weights {
            sep(&mut out);
            let _ = write!(out, "{}", graph.node_weight(v));
        }
        for (u, w) in graph.neighbors(v) {
            sep(&mut out);
            let _ = write!(out, "{}", u + 1);
            if edge_weights {
                let _ = write!(out, " {w}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_metis(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, metis_string(graph))?;
    Ok(())
}

/// Writes one PE id per line; line `i` holds the PE of node `i`.
pub fn write_mapping_to<W: Write>(assignment: &[PeId], mut out: W) -> io::Result<()> {
    let mut text = String::with_capacity(assignment.len() * 4);
    for &pe in assignment {
        let _ = writeln!(text, "{pe}");
    }
    out.write_all(text.as_bytes())
}

pub fn write_mapping(assignment: &[PeId], path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write_mapping_to(assignment, io::BufWriter::new(file))?;
    Ok(())
}

/// Parses a mapping file for `n` nodes and `k` PEs.
pub fn parse_mapping_str(text: &str, n: usize, k: usize, origin: &str) -> Result<Vec<PeId>> {
    let mut assignment = Vec::with_capacity(n);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let pe: PeId = number(line, "PE id", origin, i + 1)?;
        if pe >= k {
            return Err(parse_error(origin, i + 1, format!("PE id {pe} out of range for k = {k}")));
        }
        assignment.push(pe);
    }
    if assignment.len() != n {
        return Err(parse_error(
            origin,
            text.lines().count(),
            format!("expected {n} PE ids, found {}", assignment.len()),
        ));
    }
    Ok(assignment)
}

pub fn read_mapping(path: impl AsRef<Path>, n: usize, k: usize) -> Result<Vec<PeId>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_mapping_str(&text, n, k, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_path_file() {
        let g = parse_metis_str("3 2 0\n2\n1 3\n2\n", "t").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1), (1, 2, 1)]);
        assert_eq!(g.node_weights(), &[1, 1, 1]);
    }

    #[test]
    fn weighted_round_trip() {
        let text = "% comment\n3 2 11\n4 2 7\n5 1 7 3 2\n6 2 2\n";
        let g = parse_metis_str(text, "t").unwrap();
        assert_eq!(g.node_weights(), &[4, 5, 6]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 7), (1, 2, 2)]);
        assert_eq!(parse_metis_str(&metis_string(&g), "t").unwrap(), g);
    }

    #[test]
    fn isolated_nodes_and_blank_lines() {
        let g = parse_metis_str("3 1\n2\n1\n\n", "t").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degree(2), 0);
        assert_eq!(parse_metis_str(&metis_string(&g), "t").unwrap(), g);
    }

    #[test]
    fn edge_count_mismatch_names_both_values() {
        let err = parse_metis_str("3 5\n2\n1 3\n2\n", "g.graph").unwrap_err().to_string();
        assert!(err.contains("g.graph:1"), "{err}");
        assert!(err.contains('5') && err.contains('4'), "{err}");
    }

    #[test]
    fn structural_errors_carry_lines() {
        let asym = parse_metis_str("3 1\n2\n\n\n", "t").unwrap_err();
        assert!(matches!(asym, Error::Parse { .. }));
        let selfloop = parse_metis_str("2 1\n1\n\n", "t").unwrap_err().to_string();
        assert!(selfloop.contains("t:2") && selfloop.contains("self-loop"), "{selfloop}");
        let range = parse_metis_str("2 1\n3\n1\n", "t").unwrap_err().to_string();
        assert!(range.contains("t:2"), "{range}");
        let extra = parse_metis_str("1 0\n\n5\n", "t").unwrap_err().to_string();
        assert!(extra.contains("t:3"), "{extra}");
    }

    #[test]
    fn mapping_files() {
        let mut buf = Vec::new();
        write_mapping_to(&[0, 2, 1], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0\n2\n1\n");
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(parse_mapping_str(&text, 3, 3, "m").unwrap(), vec![0, 2, 1]);
        assert!(parse_mapping_str(&text, 3, 2, "m").is_err());
        assert!(parse_mapping_str(&text, 4, 3, "m").is_err());
    }
}
