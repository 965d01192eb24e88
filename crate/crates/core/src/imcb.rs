//! Sequential in-memory Curveball.
//!
//! Every edge lives in exactly one row: that of the endpoint whose next
//! trade comes first (ties go to the lower node). When a trade is reached,
//! its two rows therefore hold all incident edges and the rows can be reset
//! and refilled from the trade result.

use crate::error::Result;
use crate::graph::{Edge, Graph, Node};
use crate::trade::{compute_successors, TradeRandomnessOracle, TradeSequence, Trader, INFINITY};

/// Successor lists with per-node cursors.
struct SuccessorIndex {
    begin: Vec<usize>,
    cursor: Vec<usize>,
    trades: Vec<u64>,
}

impl SuccessorIndex {
    fn new(seq: &TradeSequence, n: usize) -> Result<Self> {
        let (begin, trades) = compute_successors(seq, n)?.into_parts();
        Ok(SuccessorIndex {
            cursor: begin[..n].to_vec(),
            begin,
            trades,
        })
    }

    #[inline]
    fn tau(&self, v: Node) -> u64 {
        let v = v as usize;
        if self.cursor[v] == self.begin[v + 1] {
            INFINITY
        } else {
            self.trades[self.cursor[v]]
        }
    }

    #[inline]
    fn advance(&mut self, v: Node) {
        self.cursor[v as usize] += 1;
    }
}

/// Flat adjacency rows of capacity `deg(v)` with fill cursors.
struct AdjacencyStore {
    begin: Vec<usize>,
    fill: Vec<usize>,
    payload: Vec<Node>,
}

impl AdjacencyStore {
    fn new(graph: &Graph) -> Self {
        let n = graph.n();
        let mut begin = vec![0usize; n + 1];
        for e in graph.edges() {
            begin[e.u as usize + 1] += 1;
            begin[e.v as usize + 1] += 1;
        }
        for v in 0..n {
            begin[v + 1] += begin[v];
        }
        AdjacencyStore {
            fill: begin[..n].to_vec(),
            payload: vec![0; begin[n]],
            begin,
        }
    }

    #[inline]
    fn push(&mut self, owner: Node, x: Node) {
        let slot = &mut self.fill[owner as usize];
        debug_assert!(*slot < self.begin[owner as usize + 1]);
        self.payload[*slot] = x;
        *slot += 1;
    }

    fn row(&self, v: Node) -> &[Node] {
        &self.payload[self.begin[v as usize]..self.fill[v as usize]]
    }

    fn reset(&mut self, v: Node) {
        self.fill[v as usize] = self.begin[v as usize];
    }

    fn degree(&self, v: Node) -> usize {
        self.begin[v as usize + 1] - self.begin[v as usize]
    }
}

/// Stores edge `{a, b}` at the endpoint traded first.
#[inline]
fn place(store: &mut AdjacencyStore, succ: &SuccessorIndex, a: Node, b: Node) {
    let (ta, tb) = (succ.tau(a), succ.tau(b));
    if ta < tb || (ta == tb && a < b) {
        store.push(a, b);
    } else {
        store.push(b, a);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImcbStats {
    pub trades: u64,
    /// Neighbor entries read from the store by trades.
    pub gathered: u64,
    /// Entries written to the store (initial fill included).
    pub pushes: u64,
    /// Successor-table construction work, `2ℓ + n`.
    pub setup: u64,
    /// Neighbors that changed owner, and `deg(u) + deg(v)`, summed over trades.
    pub moved: u64,
    pub slots: u64,
}

impl ImcbStats {
    pub fn operations(&self) -> u64 {
        self.setup + self.trades + self.gathered + self.pushes
    }
}

pub fn run_imcb(graph: &Graph, seq: &TradeSequence, oracle: &TradeRandomnessOracle) -> Result<Graph> {
    run_imcb_with_stats(graph, seq, oracle).map(|(g, _)| g)
}

pub fn run_imcb_with_stats(
    graph: &Graph,
    seq: &TradeSequence,
    oracle: &TradeRandomnessOracle,
) -> Result<(Graph, ImcbStats)> {
    let n = graph.n();
    let mut succ = SuccessorIndex::new(seq, n)?;
    let mut store = AdjacencyStore::new(graph);
    let mut stats = ImcbStats {
        setup: 2 * seq.len() as u64 + n as u64,
        ..ImcbStats::default()
    };
    for e in graph.edges() {
        place(&mut store, &succ, e.u, e.v);
    }
    stats.pushes += graph.m() as u64;

    let mut trader = Trader::new();
    let mut adj_u = Vec::new();
    let mut adj_v = Vec::new();
    for (k, t) in seq.pairs().iter().enumerate() {
        let (u, v) = (t.i, t.j);
        debug_assert_eq!(succ.tau(u), k as u64);
        debug_assert_eq!(succ.tau(v), k as u64);
        adj_u.clear();
        adj_v.clear();
        adj_u.extend_from_slice(store.row(u));
        adj_v.extend_from_slice(store.row(v));
        stats.gathered += (adj_u.len() + adj_v.len()) as u64;
        // the mutual edge sits in one row only
        if adj_u.contains(&v) {
            adj_v.push(u);
        } else if adj_v.contains(&u) {
            adj_u.push(v);
        }
        debug_assert_eq!(adj_u.len(), store.degree(u));
        debug_assert_eq!(adj_v.len(), store.degree(v));
        adj_u.sort_unstable();
        adj_v.sort_unstable();
        store.reset(u);
        store.reset(v);
        succ.advance(u);
        succ.advance(v);

        let (round, ordinal) = seq.key(k);
        let mut rng = oracle.stream(round, ordinal);
        let view = trader.trade(u, v, &adj_u, &adj_v, &mut rng);
        stats.moved += view.moved as u64;
        stats.slots += view.slots() as u64;
        let mut pushed = 0u64;
        view.for_each_edge(|a, b| {
            place(&mut store, &succ, a, b);
            pushed += 1;
        });
        stats.pushes += pushed;
        stats.trades += 1;
    }

    let mut edges = Vec::with_capacity(graph.m());
    for v in 0..n as Node {
        edges.extend(store.row(v).iter().map(|&x| Edge::new(v, x)));
    }
    Ok((Graph::from_edges(n, edges)?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trade::apply_naive;

    #[test]
    fn empty_sequence_is_identity() {
        let g = Graph::from_pairs(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let out = run_imcb(&g, &TradeSequence::default(), &TradeRandomnessOracle::new(1)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn triangle_is_rigid() {
        let g = Graph::from_pairs(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let seq = TradeSequence::from_pairs([(0, 1), (1, 2), (2, 0), (0, 1)]).unwrap();
        assert_eq!(run_imcb(&g, &seq, &TradeRandomnessOracle::new(4)).unwrap(), g);
    }

    #[test]
    fn matches_naive_on_example_sequence() {
        let g = Graph::from_pairs(6, [(0, 4), (1, 5), (2, 4), (3, 5), (0, 1), (2, 3)]).unwrap();
        let seq = TradeSequence::from_pairs([(0, 1), (2, 3), (0, 2), (1, 3), (0, 3)]).unwrap();
        for seed in 0..20 {
            let o = TradeRandomnessOracle::new(seed);
            assert_eq!(run_imcb(&g, &seq, &o).unwrap(), apply_naive(&g, &seq, &o));
        }
    }
}
