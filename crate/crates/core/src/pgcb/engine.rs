use std::ops::Range;
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::{Barrier, Mutex};

use super::route::{next_target, route_message, Delimiters, MessageClass, Target};
use super::{MacrochunkStat, PgcbConfig, PgcbStats, RoundMap, RoundPlan};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Node};
use crate::lcg::RankWindow;
use crate::tfp::{get_u32, get_u64, put_u32, put_u64, Record, Sorter, SpillQueue, Storage};
use crate::trade::{TradeRandomnessOracle, Trader};

/// `⟨h_R(v), deg(v), v⟩`; `node` is `u32::MAX` when nodes are recovered
/// through the inverse map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct AuxInfo {
    value: u64,
    degree: u32,
    node: u32,
}

impl Record for AuxInfo {
    const SIZE: usize = 16;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.value);
        put_u32(out, 8, self.degree);
        put_u32(out, 12, self.node);
    }
    fn decode(buf: &[u8]) -> Self {
        AuxInfo {
            value: get_u64(buf, 0),
            degree: get_u32(buf, 8),
            node: get_u32(buf, 12),
        }
    }
}

/// Neighbor `nbr` for the position with value `value`; the round is implied
/// by the queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct TargetMsg {
    value: u64,
    nbr: Node,
}

impl Record for TargetMsg {
    const SIZE: usize = 12;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.value);
        put_u32(out, 8, self.nbr);
    }
    fn decode(buf: &[u8]) -> Self {
        TargetMsg {
            value: get_u64(buf, 0),
            nbr: get_u32(buf, 8),
        }
    }
}

/// The plan's maps followed by the identity.
struct Rounds<'a, M> {
    maps: &'a [M],
}

impl<M: RoundMap> Rounds<'_, M> {
    #[inline]
    fn value(&self, round: usize, x: Node) -> u64 {
        match self.maps.get(round) {
            Some(m) => m.value(x),
            None => u64::from(x),
        }
    }

    #[inline]
    fn node(&self, round: usize, y: u64) -> Node {
        match self.maps.get(round) {
            Some(m) => m.node(y),
            None => y as Node,
        }
    }
}

fn chunk_slots(slots: usize, k: usize, c: usize) -> Range<usize> {
    c * slots / k..(c + 1) * slots / k
}

fn build_aux<M: RoundMap>(
    rounds: &Rounds<'_, M>,
    round: usize,
    degrees: &[u32],
    storage: &Storage,
    invertible: bool,
) -> Result<Sorter<AuxInfo>> {
    let mut aux = Sorter::new(storage.clone());
    for (v, &d) in degrees.iter().enumerate() {
        aux.push(AuxInfo {
            value: rounds.value(round, v as Node),
            degree: d,
            node: if invertible { u32::MAX } else { v as u32 },
        })?;
    }
    aux.switch()?;
    Ok(aux)
}

/// Reads every macrochunk's first value and rewinds.
fn scan_delimiters(aux: &mut Sorter<AuxInfo>, slots: usize, k: usize) -> Result<Delimiters> {
    let mut starts = Vec::with_capacity(k);
    let mut rank = 0;
    for c in 0..k {
        let first = 2 * chunk_slots(slots, k, c).start;
        while rank < first {
            aux.pop()?;
            rank += 1;
        }
        let a = aux.peek().copied().ok_or(Error::invalid("auxiliary stream too short"))?;
        starts.push(a.value);
    }
    aux.rewind()?;
    Ok(Delimiters::new(starts))
}

/// Batches and microchunks of one macrochunk, in relative slots.
struct Layout {
    batch_starts: Vec<usize>,
    p: usize,
}

impl Layout {
    fn new(len: usize, z: usize, p: usize) -> Self {
        Layout {
            batch_starts: (0..=z).map(|b| b * len / z).collect(),
            p,
        }
    }

    fn batches(&self) -> usize {
        self.batch_starts.len() - 1
    }

    fn micro(&self, b: usize, w: usize) -> Range<usize> {
        let (s, e) = (self.batch_starts[b], self.batch_starts[b + 1]);
        let len = e - s;
        s + w * len / self.p..s + (w + 1) * len / self.p
    }

    fn locate(&self, slot: usize) -> (usize, usize) {
        let b = self.batch_starts.partition_point(|&x| x <= slot) - 1;
        let len = self.batch_starts[b + 1] - self.batch_starts[b];
        let offset = slot - self.batch_starts[b];
        let w = ((offset + 1) * self.p).div_ceil(len) - 1;
        (b, w)
    }
}

/// Per-thread scratch space and counters.
struct Local {
    trader: Trader,
    adj_u: Vec<Node>,
    adj_v: Vec<Node>,
    edges: Vec<(Node, Node)>,
    out: Vec<Vec<TargetMsg>>,
    stack: Vec<(usize, u64)>,
    class: [u64; 4],
    trades: u64,
    pass_through: u64,
    skipped: u64,
    steals: u64,
    max_chain: u64,
    error: Option<Error>,
}

impl Local {
    fn new(queues: usize) -> Self {
        Local {
            trader: Trader::new(),
            adj_u: Vec::new(),
            adj_v: Vec::new(),
            edges: Vec::new(),
            out: vec![Vec::new(); queues],
            stack: Vec::new(),
            class: [0; 4],
            trades: 0,
            pass_through: 0,
            skipped: 0,
            steals: 0,
            max_chain: 0,
            error: None,
        }
    }
}

/// A loaded macrochunk.
struct Chunk<'a, M> {
    round: usize,
    rounds: &'a Rounds<'a, M>,
    oracle: &'a TradeRandomnessOracle,
    k: usize,
    first_slot: usize,
    first_rank: usize,
    values: Vec<u64>,
    nodes: Vec<Node>,
    offsets: Vec<usize>,
    payload: Vec<AtomicU32>,
    fill: Vec<AtomicU32>,
    totals: Vec<u32>,
    counters: Vec<AtomicU32>,
    layout: Layout,
    current: &'a Delimiters,
    next: &'a Delimiters,
    failed: AtomicBool,
}

impl<M: RoundMap> Chunk<'_, M> {
    fn window(&self) -> RankWindow<'_> {
        RankWindow::new(&self.values, self.first_rank as u64)
    }

    #[inline]
    fn push_row(&self, rel: usize, x: Node) {
        let i = self.fill[rel].fetch_add(1, Ordering::Relaxed) as usize;
        debug_assert!(self.offsets[rel] + i < self.offsets[rel + 1], "row overflow");
        self.payload[self.offsets[rel] + i].store(x, Ordering::Relaxed);
    }

    /// Writes `nbr` into the row at relative position `rel` (and the
    /// reverse entry when `nbr` is the trade partner). Returns the slot if
    /// this completed a trade whose owner already passed it.
    fn insert(&self, rel: usize, nbr: Node) -> Option<usize> {
        self.push_row(rel, nbr);
        let mut inc = 1;
        let partner = rel ^ 1;
        if partner < self.nodes.len() && self.nodes[partner] == nbr {
            self.push_row(partner, self.nodes[rel]);
            inc = 2;
        }
        let slot = rel / 2;
        let prev = self.counters[slot].fetch_add(inc, Ordering::AcqRel);
        (prev + inc == self.totals[slot]).then_some(slot)
    }

    fn read_row(&self, rel: usize, out: &mut Vec<Node>) {
        out.clear();
        out.extend(
            self.payload[self.offsets[rel]..self.offsets[rel + 1]]
                .iter()
                .map(|x| x.load(Ordering::Relaxed)),
        );
        out.sort_unstable();
    }

    fn load(&self, msgs: &[TargetMsg]) -> Result<()> {
        let window = self.window();
        for m in msgs {
            let rank = window.rank_of(m.value)? as usize;
            let done = self.insert(rank - self.first_rank, m.nbr);
            debug_assert!(done.is_none());
        }
        Ok(())
    }

    fn deliver(&self, from: usize, sender: u64, target: Target, nbr: Node, local: &mut Local) -> Result<Option<usize>> {
        let last = *self.values.last().unwrap();
        if target.round == self.round && target.value <= last {
            if target.value <= sender {
                return Err(Error::BackwardMessage {
                    target: target.value,
                    current: sender,
                });
            }
            let rel = self.window().rank_of(target.value)? as usize - self.first_rank;
            let (fb, fw) = self.layout.locate(from);
            let (tb, tw) = self.layout.locate(rel / 2);
            let class = if (fb, fw) == (tb, tw) {
                MessageClass::Microchunk
            } else if fb == tb {
                MessageClass::Batch
            } else {
                MessageClass::Macrochunk
            };
            local.class[class as usize] += 1;
            return Ok(self.insert(rel, nbr));
        }
        let q = route_message(self.k, self.current, self.next, self.round, sender, target)?;
        local.out[q].push(TargetMsg {
            value: target.value,
            nbr,
        });
        local.class[MessageClass::Queued as usize] += 1;
        Ok(None)
    }

    fn execute(&self, slot: usize, depth: u64, local: &mut Local) -> Result<()> {
        let ru = 2 * slot;
        let rv = ru + 1;
        let paired = rv < self.nodes.len();
        let u = self.nodes[ru];
        let v = if paired { self.nodes[rv] } else { Node::MAX };
        let sender = self.values[if paired { rv } else { ru }];
        local.edges.clear();
        if paired {
            self.read_row(ru, &mut local.adj_u);
            self.read_row(rv, &mut local.adj_v);
            let abs = (self.first_slot + slot) as u64;
            let mut rng = self.oracle.stream(self.round as u64, abs);
            let Local { trader, adj_u, adj_v, edges, .. } = local;
            let view = trader.trade(u, v, adj_u, adj_v, &mut rng);
            view.for_each_edge(|a, b| edges.push((a, b)));
            local.trades += 1;
        } else {
            self.read_row(ru, &mut local.adj_u);
            local.edges.extend(local.adj_u.iter().map(|&x| (u, x)));
            local.pass_through += 1;
        }
        let (round, rounds) = (self.round, self.rounds);
        let target = |x: Node| {
            let active = x == u || x == v;
            let now = if active { 0 } else { rounds.value(round, x) };
            next_target(round, sender, now, rounds.value(round + 1, x), active)
        };
        let edges = std::mem::take(&mut local.edges);
        for &(a, b) in &edges {
            let (ta, tb) = (target(a), target(b));
            let (t, nbr) = if ta < tb { (ta, b) } else { (tb, a) };
            if let Some(s) = self.deliver(slot, sender, t, nbr, local)? {
                local.stack.push((s, depth + 1));
            }
        }
        local.edges = edges;
        Ok(())
    }

    fn run_from(&self, slot: usize, local: &mut Local) -> Result<()> {
        local.stack.push((slot, 0));
        while let Some((s, depth)) = local.stack.pop() {
            if depth > 0 {
                local.steals += 1;
                local.max_chain = local.max_chain.max(depth);
            }
            self.execute(s, depth, local)?;
        }
        Ok(())
    }

    fn worker(&self, t: usize, threads: usize, barrier: &Barrier) -> Local {
        let mut local = Local::new(2 * self.k);
        for b in 0..self.layout.batches() {
            if !self.failed.load(Ordering::Relaxed) {
                for w in (t..self.layout.p).step_by(threads) {
                    for slot in self.layout.micro(b, w) {
                        let prev = self.counters[slot].fetch_add(1, Ordering::AcqRel);
                        if prev + 1 != self.totals[slot] {
                            local.skipped += 1;
                            continue;
                        }
                        if let Err(e) = self.run_from(slot, &mut local) {
                            local.error.get_or_insert(e);
                            self.failed.store(true, Ordering::Relaxed);
                        }
                    }
                }
            }
            barrier.wait();
        }
        local
    }
}

/// Runs the plan's global trades with `config.threads` worker threads.
pub fn run_empgcb<M: RoundMap>(
    graph: &Graph,
    plan: &RoundPlan<M>,
    oracle: &TradeRandomnessOracle,
    config: &PgcbConfig,
) -> Result<(Graph, PgcbStats)> {
    let n = graph.n();
    let r = plan.rounds();
    let mut stats = PgcbStats::default();
    if let Some(m) = plan.maps.iter().find(|m| m.domain() != n) {
        return Err(Error::invalid(format!(
            "map over {} nodes for a graph with {n}",
            m.domain()
        )));
    }
    if n < 2 {
        if r > 0 {
            return Err(Error::invalid("global trades need n >= 2"));
        }
        return Ok((graph.clone(), stats));
    }
    let threads = config.threads.max(1);
    let storage = &config.storage;
    let slots = n.div_ceil(2);
    let k = plan.k.clamp(1, slots);
    let degrees = graph.degrees().into_vec();
    let rounds = Rounds { maps: &plan.maps };

    let mut aux = [
        build_aux(&rounds, 0, &degrees, storage, config.invertible)?,
        build_aux(&rounds, 1, &degrees, storage, config.invertible)?,
    ];
    let mut delims = [
        scan_delimiters(&mut aux[0], slots, k)?,
        scan_delimiters(&mut aux[1], slots, k)?,
    ];
    let mut queues: Vec<Mutex<SpillQueue<TargetMsg>>> = (0..2 * k)
        .map(|_| Mutex::new(SpillQueue::new(storage.clone())))
        .collect();

    for e in graph.edges() {
        let (vu, vv) = (rounds.value(0, e.u), rounds.value(0, e.v));
        let msg = if vu < vv {
            TargetMsg { value: vu, nbr: e.v }
        } else {
            TargetMsg { value: vv, nbr: e.u }
        };
        let q = delims[0].chunk_of(msg.value);
        queues[q].get_mut().unwrap().push(msg)?;
    }
    stats.initial_messages = graph.m() as u64;

    for round in 0..r {
        let cur = round % 2;
        for c in 0..k {
            let range = chunk_slots(slots, k, c);
            let first_rank = 2 * range.start;
            let len = (2 * range.end).min(n) - first_rank;
            let mut values = Vec::with_capacity(len);
            let mut nodes = Vec::with_capacity(len);
            let mut offsets = Vec::with_capacity(len + 1);
            offsets.push(0usize);
            for _ in 0..len {
                let a = aux[cur].pop()?.ok_or(Error::invalid("auxiliary stream too short"))?;
                values.push(a.value);
                nodes.push(if config.invertible {
                    rounds.node(round, a.value)
                } else {
                    a.node
                });
                offsets.push(offsets.last().unwrap() + a.degree as usize);
            }
            let degree_sum = *offsets.last().unwrap();
            let nslots = range.len();
            let totals: Vec<u32> = (0..nslots)
                .map(|s| {
                    let deg = |q: usize| (offsets[q + 1] - offsets[q]) as u32;
                    deg(2 * s) + if 2 * s + 1 < len { deg(2 * s + 1) } else { 0 } + 1
                })
                .collect();
            let z = plan.z.min((nslots / plan.p_threads).max(1));
            let (cur_delims, next_delims) = (&delims[cur], &delims[1 - cur]);
            let chunk = Chunk {
                round,
                rounds: &rounds,
                oracle,
                k,
                first_slot: range.start,
                first_rank,
                values,
                nodes,
                offsets,
                payload: (0..degree_sum).map(|_| AtomicU32::new(0)).collect(),
                fill: (0..len).map(|_| AtomicU32::new(0)).collect(),
                totals,
                counters: (0..nslots).map(|_| AtomicU32::new(0)).collect(),
                layout: Layout::new(nslots, z, plan.p_threads),
                current: cur_delims,
                next: next_delims,
                failed: AtomicBool::new(false),
            };

            let mut msgs = queues[cur * k + c].get_mut().unwrap().drain_all()?;
            msgs.sort_unstable();
            chunk.load(&msgs)?;
            stats.macrochunks.push(MacrochunkStat {
                round,
                chunk: c,
                slots: nslots,
                loaded: msgs.len() as u64,
                degree_sum: degree_sum as u64,
            });
            drop(msgs);

            let barrier = Barrier::new(threads);
            let locals: Vec<Local> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..threads)
                    .map(|t| {
                        let (chunk, barrier) = (&chunk, &barrier);
                        s.spawn(move || chunk.worker(t, threads, barrier))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
            stats.batches += chunk.layout.batches() as u64;
            for mut l in locals {
                if let Some(e) = l.error.take() {
                    return Err(e);
                }
                stats.class_i += l.class[MessageClass::Microchunk as usize];
                stats.class_ii += l.class[MessageClass::Batch as usize];
                stats.class_iii_local += l.class[MessageClass::Macrochunk as usize];
                stats.class_iii_queued += l.class[MessageClass::Queued as usize];
                stats.trades += l.trades;
                stats.pass_through += l.pass_through;
                stats.skipped += l.skipped;
                stats.steals += l.steals;
                stats.max_steal_chain = stats.max_steal_chain.max(l.max_chain);
                for (q, buf) in l.out.into_iter().enumerate() {
                    if !buf.is_empty() {
                        queues[q].get_mut().unwrap().extend(buf)?;
                    }
                }
            }
            for (s, (cnt, &total)) in chunk.counters.iter().zip(&chunk.totals).enumerate() {
                if cnt.load(Ordering::Relaxed) != total {
                    return Err(Error::Stalled {
                        round,
                        slot: (range.start + s) as u64,
                    });
                }
            }
        }
        if round + 2 <= r {
            aux[cur] = build_aux(&rounds, round + 2, &degrees, storage, config.invertible)?;
            delims[cur] = scan_delimiters(&mut aux[cur], slots, k)?;
        }
    }

    let set = r % 2;
    let mut edges = Vec::with_capacity(graph.m());
    for c in 0..k {
        let mut msgs = queues[set * k + c].get_mut().unwrap().drain_all()?;
        msgs.sort_unstable();
        edges.extend(msgs.into_iter().map(|m| Edge::new(m.value as Node, m.nbr)));
    }
    Ok((Graph::from_edges(n, edges)?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imcb::run_imcb;
    use crate::lcg::LcgMap;
    use crate::pgcb::PermutationMap;

    #[test]
    fn layout_locates_slots() {
        let l = Layout::new(10, 3, 2);
        for b in 0..l.batches() {
            for w in 0..2 {
                for s in l.micro(b, w) {
                    assert_eq!(l.locate(s), (b, w));
                }
            }
        }
        let l = Layout::new(3, 1, 4);
        for s in 0..3 {
            let (b, w) = l.locate(s);
            assert!(l.micro(b, w).contains(&s));
        }
    }

    #[test]
    fn zero_rounds_is_identity() {
        let g = Graph::from_pairs(5, [(0, 4), (1, 3), (2, 3)]).unwrap();
        let plan = RoundPlan::<LcgMap>::new(vec![], 2, 1, 1).unwrap();
        let (out, _) = run_empgcb(&g, &plan, &TradeRandomnessOracle::new(1), &PgcbConfig::default()).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn matches_imcb_on_small_cases() {
        let g = Graph::from_pairs(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (0, 6), (0, 3), (2, 5)])
            .unwrap();
        let maps = vec![
            LcgMap::new(4, 1, 7).unwrap(),
            LcgMap::new(3, 5, 7).unwrap(),
            LcgMap::new(6, 0, 7).unwrap(),
        ];
        for (k, z, p, threads) in [(1, 1, 1, 1), (2, 2, 2, 2), (4, 1, 3, 3), (3, 2, 1, 1)] {
            let plan = RoundPlan::new(maps.clone(), k, z, p).unwrap();
            let o = TradeRandomnessOracle::new(99);
            let config = PgcbConfig {
                threads,
                ..PgcbConfig::default()
            };
            let (out, st) = run_empgcb(&g, &plan, &o, &config).unwrap();
            assert_eq!(out, run_imcb(&g, &plan.trade_sequence(7), &o).unwrap(), "k={k} z={z} p={p}");
            assert_eq!(st.trades, 3 * 3);
            assert_eq!(st.pass_through, 3);
        }
    }

    #[test]
    fn permutation_rounds_and_aux_nodes() {
        let g = Graph::from_pairs(6, [(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (2, 3)]).unwrap();
        let maps = vec![
            PermutationMap::new(vec![2, 0, 1, 4, 3, 5]).unwrap(),
            PermutationMap::new(vec![5, 2, 4, 0, 1, 3]).unwrap(),
        ];
        let plan = RoundPlan::new(maps, 2, 1, 2).unwrap();
        let o = TradeRandomnessOracle::new(5);
        let want = run_imcb(&g, &plan.trade_sequence(6), &o).unwrap();
        for invertible in [true, false] {
            let config = PgcbConfig {
                invertible,
                storage: Storage::temp(8, 2).unwrap(),
                ..PgcbConfig::default()
            };
            assert_eq!(run_empgcb(&g, &plan, &o, &config).unwrap().0, want);
        }
    }
}
