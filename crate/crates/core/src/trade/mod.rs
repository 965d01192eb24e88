//! Curveball trades.
//!
//! A trade between `u` and `v` keeps their common neighbors (and the edge
//! `{u, v}` if present) and redistributes the *disjoint* neighbors
//! `D = (N(u) ∪ N(v)) \ (N(u) ∩ N(v)) \ {u, v}`: a uniform random subset of
//! size `|N(u) ∩ D|` goes to `u`, the rest to `v`. Every engine funnels its
//! trades through [`Trader::trade`], which draws that subset from the
//! trade's own oracle stream, so all engines agree edge for edge.

mod global;
mod oracle;
mod successor;

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

pub use global::{expand_global_trade, expand_rounds, GlobalTradeDescriptor};
pub use oracle::TradeRandomnessOracle;
pub use successor::{compute_successors, SuccessorTable, INFINITY};

use crate::error::{Error, Result};
use crate::graph::{Graph, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TradePair {
    pub i: Node,
    pub j: Node,
}

impl TradePair {
    pub fn new(i: Node, j: Node) -> Result<Self> {
        if i == j {
            return Err(Error::DegenerateTrade(i));
        }
        Ok(TradePair { i, j })
    }
}

/// Ordered trades. When built from global trades, `round_len` records the
/// number of trades per round so that trade `k` is keyed as
/// `(k / round_len, k % round_len)` in the randomness oracle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TradeSequence {
    pairs: Vec<TradePair>,
    round_len: Option<usize>,
}

impl TradeSequence {
    pub fn new(pairs: Vec<TradePair>) -> Self {
        TradeSequence {
            pairs,
            round_len: None,
        }
    }

    pub fn with_round_len(pairs: Vec<TradePair>, round_len: usize) -> Self {
        assert!(round_len > 0 || pairs.is_empty());
        TradeSequence {
            pairs,
            round_len: (round_len > 0).then_some(round_len),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Node, Node)>>(pairs: I) -> Result<Self> {
        let pairs = pairs
            .into_iter()
            .map(|(i, j)| TradePair::new(i, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(pairs))
    }

    /// Draws `len` trades with both endpoints uniform (and distinct).
    pub fn uniform<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("uniform trades need n >= 2"));
        }
        let pairs = (0..len)
            .map(|_| {
                let i = rng.random_range(0..n as Node);
                let mut j = rng.random_range(0..n as Node - 1);
                if j >= i {
                    j += 1;
                }
                TradePair { i, j }
            })
            .collect();
        Ok(Self::new(pairs))
    }

    pub fn pairs(&self) -> &[TradePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn round_len(&self) -> Option<usize> {
        self.round_len
    }

    /// Oracle key `(round, ordinal)` of trade `index`.
    #[inline]
    pub fn key(&self, index: usize) -> (u64, u64) {
        match self.round_len {
            Some(len) => ((index / len) as u64, (index % len) as u64),
            None => (0, index as u64),
        }
    }

    pub fn max_node(&self) -> Option<Node> {
        self.pairs.iter().map(|t| t.i.max(t.j)).max()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.max_node() {
            Some(x) if x as usize >= n => Err(Error::NodeOutOfRange { node: x.into(), n }),
            _ => Ok(()),
        }
    }

    /// Concatenates sequences; the round length survives only if both agree.
    pub fn concat(mut self, other: TradeSequence) -> TradeSequence {
        if self.pairs.is_empty() {
            return other;
        }
        if !other.pairs.is_empty() && self.round_len != other.round_len {
            self.round_len = None;
        }
        self.pairs.extend(other.pairs);
        self
    }

    /// Reads one `i j` pair per line, with the edge-list comment rules.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut pairs = Vec::new();
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
            let ids: Vec<&str> = t.split_whitespace().collect();
            let [a, b] = ids[..] else {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected exactly two node ids".into(),
                });
            };
            let parse = |s: &str| {
                s.parse::<Node>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid node id {s:?}"),
                })
            };
            let (a, b) = (parse(a)?, parse(b)?);
            pairs.push(TradePair::new(a, b).map_err(|_| Error::Parse {
                line: lineno,
                message: format!("trade of node {a} with itself"),
            })?);
        }
        Ok(Self::new(pairs))
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in &self.pairs {
            writeln!(w, "{} {}", t.i, t.j)?;
        }
        w.flush()
    }
}

/// Partition of two sorted neighborhoods `A_i`, `A_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Disjoint {
    /// `A_i \ (A_j ∪ {j})`
    pub only_i: Vec<Node>,
    /// `A_j \ (A_i ∪ {i})`
    pub only_j: Vec<Node>,
    pub shared: Vec<Node>,
    pub has_edge: bool,
}

/// Splits two sorted neighbor lists with a single merge pass.
pub fn disjoint_neighbours(adj_i: &[Node], adj_j: &[Node], i: Node, j: Node) -> Disjoint {
    let mut out = Disjoint::default();
    split_into(adj_i, adj_j, i, j, &mut out);
    out
}

fn split_into(adj_i: &[Node], adj_j: &[Node], i: Node, j: Node, out: &mut Disjoint) {
    out.only_i.clear();
    out.only_j.clear();
    out.shared.clear();
    out.has_edge = false;
    let (mut x, mut y) = (0, 0);
    loop {
        match (adj_i.get(x), adj_j.get(y)) {
            (Some(&a), Some(&b)) if a == b => {
                out.shared.push(a);
                x += 1;
                y += 1;
            }
            (Some(&a), b) if b.is_none_or(|&b| a < b) => {
                if a == j {
                    out.has_edge = true;
                } else {
                    out.only_i.push(a);
                }
                x += 1;
            }
            (_, Some(&b)) => {
                if b == i {
                    out.has_edge = true;
                } else {
                    out.only_j.push(b);
                }
                y += 1;
            }
            (None, None) => break,
            (Some(_), None) => unreachable!(),
        }
    }
}

/// Result of one trade. `to_u` and `to_v` are the disjoint neighbors after
/// reassignment; `shared` and the `{u, v}` edge are untouched.
#[derive(Debug)]
pub struct TradeView<'a> {
    pub u: Node,
    pub v: Node,
    pub has_edge: bool,
    pub shared: &'a [Node],
    pub to_u: &'a [Node],
    pub to_v: &'a [Node],
    /// Number of disjoint neighbors that changed owner (counted on both sides).
    pub moved: usize,
}

impl TradeView<'_> {
    /// Neighbor slots considered: `deg(u) + deg(v)`.
    pub fn slots(&self) -> usize {
        2 * self.shared.len() + self.to_u.len() + self.to_v.len() + 2 * usize::from(self.has_edge)
    }

    /// Calls `f(a, b)` once for every edge incident to `u` or `v` after the
    /// trade, with `a ∈ {u, v}`.
    pub fn for_each_edge(&self, mut f: impl FnMut(Node, Node)) {
        if self.has_edge {
            f(self.u, self.v);
        }
        for &x in self.shared {
            f(self.u, x);
            f(self.v, x);
        }
        for &x in self.to_u {
            f(self.u, x);
        }
        for &x in self.to_v {
            f(self.v, x);
        }
    }

    pub fn new_neighbours_u(&self) -> Vec<Node> {
        self.new_neighbours(self.to_u, self.v)
    }

    pub fn new_neighbours_v(&self) -> Vec<Node> {
        self.new_neighbours(self.to_v, self.u)
    }

    fn new_neighbours(&self, own: &[Node], partner: Node) -> Vec<Node> {
        let mut out: Vec<Node> = self.shared.iter().chain(own).copied().collect();
        if self.has_edge {
            out.push(partner);
        }
        out.sort_unstable();
        out
    }
}

/// Reusable buffers for executing trades.
#[derive(Debug, Default)]
pub struct Trader {
    split: Disjoint,
    pool: Vec<Node>,
}

impl Trader {
    pub fn new() -> Self {
        Self::default()
    }

    /// Trades `u` with `v` given their *sorted* current neighborhoods.
    ///
    /// The disjoint neighbors are merged in ascending order and a partial
    /// shuffle picks the `|A_u \ A_v|` of them that go to `u`.
    pub fn trade<R: Rng + ?Sized>(
        &mut self,
        u: Node,
        v: Node,
        adj_u: &[Node],
        adj_v: &[Node],
        rng: &mut R,
    ) -> TradeView<'_> {
        split_into(adj_u, adj_v, u, v, &mut self.split);
        let keep = self.split.only_i.len();
        self.pool.clear();
        merge_sorted(&self.split.only_i, &self.split.only_j, &mut self.pool);
        let (to_u, to_v) = self.pool.partial_shuffle(rng, keep);
        let (to_u, to_v): (&[Node], &[Node]) = (to_u, to_v);
        let from_v = to_u
            .iter()
            .filter(|x| self.split.only_i.binary_search(x).is_err())
            .count();
        TradeView {
            u,
            v,
            has_edge: self.split.has_edge,
            shared: &self.split.shared,
            to_u,
            to_v,
            moved: 2 * from_v,
        }
    }
}

fn merge_sorted(a: &[Node], b: &[Node], out: &mut Vec<Node>) {
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Per-trade bookkeeping returned by [`AdjacencyLists::apply_trade`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TradeStats {
    pub moved: usize,
    pub slots: usize,
}

/// Mutable graph with sorted neighbor rows; the reference implementation of
/// trade application that the engines are checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyLists {
    rows: Vec<Vec<Node>>,
}

impl AdjacencyLists {
    pub fn from_graph(g: &Graph) -> Self {
        let adj = g.adjacency();
        AdjacencyLists {
            rows: (0..g.n() as Node).map(|v| adj.neighbors(v).to_vec()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn neighbors(&self, v: Node) -> &[Node] {
        &self.rows[v as usize]
    }

    pub fn to_graph(&self) -> Graph {
        let edges = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter()
                    .filter(move |&&v| (u as Node) < v)
                    .map(move |&v| crate::graph::Edge { u: u as Node, v })
            })
            .collect();
        Graph::from_sorted_unchecked(self.rows.len(), edges)
    }

    /// Applies trade `t`, restoring symmetry in the passive rows.
    pub fn apply_trade<R: Rng + ?Sized>(
        &mut self,
        t: TradePair,
        rng: &mut R,
        trader: &mut Trader,
    ) -> TradeStats {
        let (u, v) = (t.i, t.j);
        let adj_u = std::mem::take(&mut self.rows[u as usize]);
        let adj_v = std::mem::take(&mut self.rows[v as usize]);
        let view = trader.trade(u, v, &adj_u, &adj_v, rng);
        let stats = TradeStats {
            moved: view.moved,
            slots: view.slots(),
        };
        // passive side: relabel neighbors that switched owner
        for &x in view.to_u {
            if adj_u.binary_search(&x).is_err() {
                relabel(&mut self.rows[x as usize], v, u);
            }
        }
        for &x in view.to_v {
            if adj_v.binary_search(&x).is_err() {
                relabel(&mut self.rows[x as usize], u, v);
            }
        }
        let new_u = view.new_neighbours_u();
        let new_v = view.new_neighbours_v();
        self.rows[u as usize] = new_u;
        self.rows[v as usize] = new_v;
        stats
    }

    /// Applies every trade of `seq` with streams drawn from `oracle`.
    pub fn apply_sequence(&mut self, seq: &TradeSequence, oracle: &TradeRandomnessOracle) {
        let mut trader = Trader::new();
        for (k, &t) in seq.pairs().iter().enumerate() {
            let (round, ordinal) = seq.key(k);
            let mut rng = oracle.stream(round, ordinal);
            self.apply_trade(t, &mut rng, &mut trader);
        }
    }
}

fn relabel(row: &mut Vec<Node>, from: Node, to: Node) {
    let at = row.binary_search(&from).expect("symmetric adjacency");
    row.remove(at);
    let ins = row.binary_search(&to).expect_err("simple graph");
    row.insert(ins, to);
}

/// Applies `seq` to `graph` on plain adjacency lists.
pub fn apply_naive(graph: &Graph, seq: &TradeSequence, oracle: &TradeRandomnessOracle) -> Graph {
    let mut adj = AdjacencyLists::from_graph(graph);
    adj.apply_sequence(seq, oracle);
    adj.to_graph()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // i = 7 and j = 8 are adjacent and share neighbor 6.
    const I: Node = 7;
    const J: Node = 8;

    #[test]
    fn split_of_adjacent_pair() {
        let d = disjoint_neighbours(&[1, 2, 6, J], &[3, 4, 5, 6, I], I, J);
        assert_eq!(d.only_i, vec![1, 2]);
        assert_eq!(d.only_j, vec![3, 4, 5]);
        assert_eq!(d.shared, vec![6]);
        assert!(d.has_edge);
    }

    #[test]
    fn empty_and_full_overlap() {
        assert_eq!(disjoint_neighbours(&[], &[], 0, 1), Disjoint::default());
        let d = disjoint_neighbours(&[3], &[3], 0, 1);
        assert!(d.only_i.is_empty() && d.only_j.is_empty());
        assert_eq!(d.shared, vec![3]);
        assert!(!d.has_edge);
    }

    fn pair_graph() -> Graph {
        Graph::from_pairs(
            9,
            [(I, J), (I, 6), (J, 6), (I, 1), (I, 2), (J, 3), (J, 4), (J, 5)],
        )
        .unwrap()
    }

    /// Finds a seed whose stream sends {3, 4} to `i`.
    #[test]
    fn reassignment_keeps_shared_and_partner() {
        let g = pair_graph();
        let t = TradePair::new(I, J).unwrap();
        let mut found = false;
        for seed in 0..200 {
            let mut adj = AdjacencyLists::from_graph(&g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            adj.apply_trade(t, &mut rng, &mut Trader::new());
            if adj.neighbors(I) == [3, 4, 6, J] {
                assert_eq!(adj.neighbors(J), &[1, 2, 5, 6, I]);
                assert_eq!(adj.neighbors(1), &[J]);
                assert_eq!(adj.neighbors(3), &[I]);
                assert_eq!(adj.neighbors(5), &[J]);
                assert_eq!(adj.neighbors(6), &[I, J]);
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn identity_assignment_leaves_graph() {
        let g = Graph::from_pairs(4, [(0, 2), (1, 3)]).unwrap();
        let mut hits = 0;
        for seed in 0..32 {
            let mut adj = AdjacencyLists::from_graph(&g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let st = adj.apply_trade(TradePair::new(0, 1).unwrap(), &mut rng, &mut Trader::new());
            if st.moved == 0 {
                assert_eq!(adj.to_graph(), g);
                hits += 1;
            } else {
                assert_eq!(adj.neighbors(0), &[3]);
            }
        }
        assert!(hits > 0 && hits < 32);
    }

    #[test]
    fn path_endpoints_share_everything() {
        // 0 - 1 - 2, trading the endpoints: D is empty for every stream.
        let g = Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        for seed in 0..16 {
            let mut adj = AdjacencyLists::from_graph(&g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let st = adj.apply_trade(TradePair::new(0, 2).unwrap(), &mut rng, &mut Trader::new());
            assert_eq!(adj.to_graph(), g);
            assert_eq!(st.moved, 0);
            assert_eq!(st.slots, 2);
        }
    }

    #[test]
    fn reject_degenerate_pairs() {
        assert!(TradePair::new(2, 2).is_err());
        assert!(TradeSequence::from_pairs([(0, 1), (3, 3)]).is_err());
    }

    #[test]
    fn sequence_text_format() {
        let s = TradeSequence::parse("# t\n0 1\n\n3 2\n".as_bytes()).unwrap();
        assert_eq!(s.pairs(), &[TradePair { i: 0, j: 1 }, TradePair { i: 3, j: 2 }]);
        let mut out = Vec::new();
        s.write(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n3 2\n");
        assert!(TradeSequence::parse("4 4\n".as_bytes()).is_err());
    }

    #[test]
    fn oracle_keys_follow_rounds() {
        let pairs = vec![TradePair { i: 0, j: 1 }; 5];
        let flat = TradeSequence::new(pairs.clone());
        assert_eq!(flat.key(4), (0, 4));
        let rounds = TradeSequence::with_round_len(pairs, 2);
        assert_eq!(rounds.key(4), (2, 0));
        assert_eq!(rounds.key(3), (1, 1));
    }
}
