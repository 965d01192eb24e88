//! Plain-text edge lists and degree files.
//!
//! Edge list: one edge per line as two whitespace-separated decimal node ids.
//! Lines starting with `#` are comments and blank lines are skipped. The
//! writer emits a `# nodes <n>` header which the reader honors so isolated
//! trailing nodes survive a round trip; without it `n` is one past the
//! largest id seen.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rustc_hash::FxHashSet;

use super::{DegreeSequence, Edge, Graph, Node};
use crate::error::{Error, Result};

const NODES_HEADER: &str = "# nodes ";

fn parse_id(tok: &str, line: usize) -> Result<Node> {
    tok.parse::<Node>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid node id {tok:?}"),
    })
}

pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut seen = FxHashSet::default();
    let mut edges = Vec::new();
    let mut max_id: Option<Node> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(NODES_HEADER) {
            let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node count {rest:?}"),
            })?;
            declared_n = Some(n);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: "expected exactly two node ids".into(),
            });
        };
        let a = parse_id(a, lineno)?;
        let b = parse_id(b, lineno)?;
        if a == b {
            return Err(Error::SelfLoop {
                line: lineno,
                node: a,
            });
        }
        let e = Edge::new(a, b);
        if !seen.insert(e) {
            return Err(Error::DuplicateEdge {
                line: lineno,
                u: e.u,
                v: e.v,
            });
        }
        max_id = Some(max_id.map_or(e.v, |m| m.max(e.v)));
        edges.push(e);
    }

    let implied = max_id.map_or(0, |m| m as usize + 1);
    let n = match declared_n {
        Some(n) if n < implied => {
            return Err(Error::NodeOutOfRange {
                node: (implied - 1) as u64,
                n,
            })
        }
        Some(n) => n,
        None => implied,
    };
    Graph::from_edges(n, edges)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file))
}

pub fn write_edge_list_to<W: Write>(graph: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{NODES_HEADER}{}", graph.n())?;
    for e in graph.edges() {
        writeln!(w, "{} {}", e.u, e.v)?;
    }
    w.flush()
}

pub fn write_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_edge_list_to(graph, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn parse_degree_sequence<R: BufRead>(reader: R) -> Result<DegreeSequence> {
    let mut degrees = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let d = t.parse::<u32>().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid degree {t:?}"),
        })?;
        degrees.push(d);
    }
    Ok(DegreeSequence::new(degrees))
}

pub fn read_degree_sequence(path: impl AsRef<Path>) -> Result<DegreeSequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_degree_sequence(BufReader::new(file))
}
