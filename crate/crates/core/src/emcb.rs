//! Sequential message-driven Curveball.
//!
//! Trades are points in time that receive messages. Each edge travels as a
//! message to the next trade in which one of its endpoints is active,
//! carrying the successor of the other endpoint; a trade rebuilds both
//! neighborhoods from its inbox, trades, and forwards every resulting edge.
//! Edges whose endpoints are never active again are written to the output.

use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::graph::{Edge, Graph, Node};
use crate::tfp::{get_u32, get_u64, put_u32, put_u64, Message, MsgPq, Record, Sorter, Storage};
use crate::trade::{compute_successors, SuccessorTable, TradeRandomnessOracle, TradeSequence, Trader, INFINITY};

/// `⟨target, a, b, τ_b⟩`: edge `{a, b}` for trade `target`, in which `a` is
/// active; `τ_b` is the next trade of `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeMsg {
    pub target: u64,
    pub a: Node,
    pub b: Node,
    pub succ_b: u64,
}

impl Record for EdgeMsg {
    const SIZE: usize = 24;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.target);
        put_u32(out, 8, self.a);
        put_u32(out, 12, self.b);
        put_u64(out, 16, self.succ_b);
    }
    fn decode(buf: &[u8]) -> Self {
        EdgeMsg {
            target: get_u64(buf, 0),
            a: get_u32(buf, 8),
            b: get_u32(buf, 12),
            succ_b: get_u64(buf, 16),
        }
    }
}

impl Message for EdgeMsg {
    fn key(&self) -> u64 {
        self.target
    }
}

/// `⟨trade, node, next⟩`: `node` is active in `trade` and next in `next`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepMsg {
    pub trade: u64,
    pub node: Node,
    pub next: u64,
}

impl Record for DepMsg {
    const SIZE: usize = 20;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.trade);
        put_u32(out, 8, self.node);
        put_u64(out, 12, self.next);
    }
    fn decode(buf: &[u8]) -> Self {
        DepMsg {
            trade: get_u64(buf, 0),
            node: get_u32(buf, 8),
            next: get_u64(buf, 12),
        }
    }
}

/// `(node, trade)` pairs for grouping the trades of each node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct NodeTrade {
    node: Node,
    trade: u64,
}

impl Record for NodeTrade {
    const SIZE: usize = 12;
    fn encode(&self, out: &mut [u8]) {
        put_u32(out, 0, self.node);
        put_u64(out, 4, self.trade);
    }
    fn decode(buf: &[u8]) -> Self {
        NodeTrade {
            node: get_u32(buf, 0),
            trade: get_u64(buf, 4),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EmcbConfig {
    pub storage: Storage,
    /// Record the inbox size of every trade in [`EmcbStats::received`].
    pub trace: bool,
    /// Check every forwarded successor against a successor table.
    pub check_successors: bool,
}

impl EmcbConfig {
    pub fn new(storage: Storage) -> Self {
        EmcbConfig {
            storage,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmcbStats {
    /// Edge messages delivered during the main phase.
    pub edge_messages: u64,
    /// Edges written to the output without ever reaching a trade.
    pub finalized_direct: u64,
    /// Edges written to the output by trades.
    pub finalized_by_trades: u64,
    /// Inbox size per trade (only with `trace`).
    pub received: Vec<u32>,
}

fn route(a: Node, ta: u64, b: Node, tb: u64) -> Option<EdgeMsg> {
    if ta == INFINITY && tb == INFINITY {
        None
    } else if ta < tb || (ta == tb && a < b) {
        Some(EdgeMsg { target: ta, a, b, succ_b: tb })
    } else {
        Some(EdgeMsg { target: tb, a: b, b: a, succ_b: ta })
    }
}

pub fn run_emcb(
    graph: &Graph,
    seq: &TradeSequence,
    oracle: &TradeRandomnessOracle,
    config: &EmcbConfig,
) -> Result<(Graph, EmcbStats)> {
    let n = graph.n();
    seq.check_range(n)?;
    let storage = &config.storage;
    let check = if config.check_successors {
        Some(compute_successors(seq, n)?)
    } else {
        None
    };
    let mut stats = EmcbStats::default();

    // preprocessing: group trades by node
    let mut t_to_v = Sorter::new(storage.clone());
    for (k, t) in seq.pairs().iter().enumerate() {
        t_to_v.push(NodeTrade { node: t.i, trade: k as u64 })?;
        t_to_v.push(NodeTrade { node: t.j, trade: k as u64 })?;
    }
    t_to_v.switch()?;

    let mut deps = Sorter::new(storage.clone());
    let mut v_to_v = MsgPq::<EdgeMsg>::new(storage.clone());
    let mut pq = MsgPq::<EdgeMsg>::new(storage.clone());
    let mut output = Sorter::<u64>::new(storage.clone());
    let edges = graph.edges();
    let mut e_at = 0;
    let mut mine = Vec::new();
    for u in 0..n as Node {
        mine.clear();
        while let Some(&nt) = t_to_v.peek() {
            if nt.node != u {
                break;
            }
            mine.push(nt.trade);
            t_to_v.pop()?;
        }
        let first = mine.first().copied().unwrap_or(INFINITY);
        for (i, &t) in mine.iter().enumerate() {
            let next = mine.get(i + 1).copied().unwrap_or(INFINITY);
            deps.push(DepMsg { trade: t, node: u, next })?;
        }
        // edges {w, u} with w < u, announced when w was scanned
        while let Some(msg) = v_to_v.pop_if_key(u64::from(u))? {
            match route(u, first, msg.b, msg.succ_b) {
                Some(m) => pq.push(m)?,
                None => {
                    output.push(Edge::new(u, msg.b).key())?;
                    stats.finalized_direct += 1;
                }
            }
        }
        while e_at < edges.len() && edges[e_at].u == u {
            let v = edges[e_at].v;
            v_to_v.push(EdgeMsg { target: u64::from(v), a: v, b: u, succ_b: first })?;
            e_at += 1;
        }
    }
    drop(t_to_v);
    drop(v_to_v);
    deps.switch()?;

    // main phase
    let mut trader = Trader::new();
    let mut adj_u = Vec::new();
    let mut adj_v = Vec::new();
    let mut succ_of: FxHashMap<Node, u64> = FxHashMap::default();
    if config.trace {
        stats.received = Vec::with_capacity(seq.len());
    }
    for (k, t) in seq.pairs().iter().enumerate() {
        let k = k as u64;
        let (u, v) = (t.i, t.j);
        let mut tau_u = INFINITY;
        let mut tau_v = INFINITY;
        for _ in 0..2 {
            let d = deps.pop()?.expect("two dependency messages per trade");
            debug_assert_eq!(d.trade, k);
            if d.node == u {
                tau_u = d.next;
            } else {
                tau_v = d.next;
            }
        }
        adj_u.clear();
        adj_v.clear();
        succ_of.clear();
        let mut received = 0u32;
        while let Some(msg) = pq.pop_if_key(k)? {
            received += 1;
            let (own, other, partner) = if msg.a == u {
                (&mut adj_u, &mut adj_v, v)
            } else {
                (&mut adj_v, &mut adj_u, u)
            };
            own.push(msg.b);
            if msg.b == partner {
                other.push(msg.a);
            } else {
                succ_of.insert(msg.b, msg.succ_b);
            }
        }
        stats.edge_messages += u64::from(received);
        if config.trace {
            stats.received.push(received);
        }
        adj_u.sort_unstable();
        adj_v.sort_unstable();
        succ_of.insert(u, tau_u);
        succ_of.insert(v, tau_v);

        let (round, ordinal) = seq.key(k as usize);
        let mut rng = oracle.stream(round, ordinal);
        let view = trader.trade(u, v, &adj_u, &adj_v, &mut rng);
        let mut failure = None;
        view.for_each_edge(|a, b| {
            if failure.is_some() {
                return;
            }
            let (ta, tb) = (succ_of[&a], succ_of[&b]);
            if let Some(table) = &check {
                debug_check(table, k, a, ta, b, tb);
            }
            let res = match route(a, ta, b, tb) {
                Some(m) => pq.push(m),
                None => {
                    stats.finalized_by_trades += 1;
                    output.push(Edge::new(a, b).key())
                }
            };
            if let Err(e) = res {
                failure = Some(e);
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    debug_assert!(pq.is_empty());

    output.switch()?;
    let mut out = Vec::with_capacity(graph.m());
    while let Some(key) = output.pop()? {
        out.push(Edge::from_key(key));
    }
    Ok((Graph::from_edges(n, out)?, stats))
}

fn debug_check(table: &SuccessorTable, k: u64, a: Node, ta: u64, b: Node, tb: u64) {
    assert_eq!(table.next_after(a, Some(k)), ta, "successor of {a} after trade {k}");
    assert_eq!(table.next_after(b, Some(k)), tb, "successor of {b} after trade {k}");
}
