//! Simple undirected graphs stored as canonical edge lists.
//!
//! Nodes are 0-based `u32` indices. An [`Edge`] always stores its smaller
//! endpoint first, and a [`Graph`] keeps its edges sorted and free of
//! duplicates and self-loops, so two graphs are equal iff their edge sets are.

mod degrees;
mod io;

use std::fmt;

pub use degrees::{havel_hakimi, sample_powerlaw_degrees, DegreeSequence, PowerlawSpec};
pub use io::{
    parse_degree_sequence, parse_edge_list, read_degree_sequence, read_edge_list,
    write_edge_list, write_edge_list_to,
};

use crate::error::{Error, Result};

pub type Node = u32;

/// Undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: Node,
    pub v: Node,
}

impl Edge {
    /// Normalizes the endpoint order. Panics on a self-loop.
    pub fn new(a: Node, b: Node) -> Self {
        assert_ne!(a, b, "self-loop {a}");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    /// Packs the edge into a single ordered key.
    #[inline]
    pub fn key(self) -> u64 {
        (u64::from(self.u) << 32) | u64::from(self.v)
    }

    #[inline]
    pub fn from_key(key: u64) -> Self {
        Edge {
            u: (key >> 32) as Node,
            v: key as Node,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
        }
    }

    /// Builds a graph from arbitrary endpoint pairs, rejecting self-loops,
    /// duplicates and out-of-range nodes.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for x in [a, b] {
                if x as usize >= n {
                    return Err(Error::NodeOutOfRange {
                        node: x.into(),
                        n,
                    });
                }
            }
            if a == b {
                return Err(Error::NotSimple(format!("self-loop at node {a}")));
            }
            edges.push(Edge::new(a, b));
        }
        Self::from_edges(n, edges)
    }

    /// Sorts `edges` and verifies the result is simple.
    pub fn from_edges(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotSimple(format!("duplicate edge {}", w[0])));
        }
        if let Some(e) = edges.iter().find(|e| e.u >= e.v) {
            return Err(Error::NotSimple(format!("malformed edge {e}")));
        }
        if let Some(e) = edges.last() {
            if e.v as usize >= n {
                return Err(Error::NodeOutOfRange {
                    node: e.v.into(),
                    n,
                });
            }
        }
        Ok(Graph { n, edges })
    }

    /// Builds a graph from edges already known to be canonical and simple.
    /// Only checked in debug builds.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|e| e.u < e.v && (e.v as usize) < n));
        Graph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    pub fn has_edge(&self, a: Node, b: Node) -> bool {
        a != b && self.edges.binary_search(&Edge::new(a, b)).is_ok()
    }

    pub fn degrees(&self) -> DegreeSequence {
        let mut deg = vec![0u32; self.n];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        DegreeSequence::new(deg)
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().as_slice().iter().copied().max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::from_graph(self)
    }
}

/// Compressed adjacency view with sorted neighbor rows.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<Node>,
}

impl Adjacency {
    pub fn from_graph(g: &Graph) -> Self {
        let mut offsets = vec![0usize; g.n() + 1];
        for e in g.edges() {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 0..g.n() {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0; offsets[g.n()]];
        // Edges are sorted by (u, v): pushing v into row u and u into row v in
        // edge order leaves every row sorted.
        for e in g.edges() {
            targets[cursor[e.u as usize]] = e.v;
            cursor[e.u as usize] += 1;
            targets[cursor[e.v as usize]] = e.u;
            cursor[e.v as usize] += 1;
        }
        Adjacency { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: Node) -> &[Node] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: Node) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_normalized_and_sorted() {
        let g = Graph::from_pairs(4, [(2, 1), (0, 3), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1), Edge::new(0, 3), Edge::new(1, 2)]);
        assert!(g.has_edge(1, 2));
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(Graph::from_pairs(3, [(1, 1)]).is_err());
        assert!(Graph::from_pairs(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_pairs(3, [(0, 3)]).is_err());
    }

    #[test]
    fn adjacency_rows_sorted_and_symmetric() {
        let g = Graph::from_pairs(5, [(3, 4), (0, 4), (4, 1), (0, 1)]).unwrap();
        let adj = g.adjacency();
        assert_eq!(adj.neighbors(4), &[0, 1, 3]);
        assert_eq!(adj.neighbors(0), &[1, 4]);
        assert_eq!(adj.neighbors(2), &[] as &[Node]);
        let total: usize = (0..5).map(|v| adj.degree(v)).sum();
        assert_eq!(total, 2 * g.m());
    }

    #[test]
    fn edge_key_round_trip() {
        let e = Edge::new(7, 3);
        assert_eq!(Edge::from_key(e.key()), e);
        assert!(Edge::new(0, 9).key() < Edge::new(1, 2).key());
    }
}
