//! Parallel global-trade Curveball.
//!
//! Each round is a global trade given by an injective map `h_R`; the node
//! with the `q`-th smallest image is at *position* `q` and positions
//! `2s, 2s+1` form trade *slot* `s`. Messages are addressed by `(round,
//! h_R(node))`. A round is cut into `k` macrochunks of contiguous slots;
//! messages for a macrochunk wait in one of `2k` queues (current and next
//! round) until it is loaded into an adjacency array. Each macrochunk is
//! processed in `z` batches of `p_threads` microchunks which run in
//! parallel; a trade whose inputs are incomplete is skipped and later run
//! by whichever thread delivers its last missing neighbor.
//!
//! After the last round an untraded identity round `h(x) = x` collects the
//! edges, which yields a sorted edge list.

mod engine;
mod estimate;
mod route;

pub use engine::run_empgcb;
pub use estimate::{
    choose_k, default_z, estimate_batch_dependencies, estimate_max_macrochunk, BatchEstimate,
    MacrochunkEstimate,
};
pub use route::{next_target, route_message, Delimiters, MessageClass, Target};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Node};
use crate::lcg::LcgMap;
use crate::tfp::Storage;
use crate::trade::{TradePair, TradeSequence};

/// An injective map from nodes to sortable values, used as one global trade.
pub trait RoundMap: Send + Sync {
    fn domain(&self) -> usize;
    fn value(&self, x: Node) -> u64;
    /// Inverse of [`value`](RoundMap::value) on its image.
    fn node(&self, y: u64) -> Node;

    /// Nodes in ascending order of their values.
    fn order(&self) -> Vec<Node> {
        let mut nodes: Vec<Node> = (0..self.domain() as Node).collect();
        nodes.sort_unstable_by_key(|&x| self.value(x));
        nodes
    }
}

impl RoundMap for LcgMap {
    fn domain(&self) -> usize {
        LcgMap::domain(self) as usize
    }

    fn value(&self, x: Node) -> u64 {
        self.eval(u64::from(x))
    }

    fn node(&self, y: u64) -> Node {
        self.invert(y) as Node
    }

    fn order(&self) -> Vec<Node> {
        self.nodes_by_rank().into_iter().map(|x| x as Node).collect()
    }
}

/// A global trade given as an explicit node order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMap {
    order: Vec<Node>,
    position: Vec<u32>,
}

impl PermutationMap {
    pub fn new(order: Vec<Node>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![u32::MAX; n];
        for (q, &v) in order.iter().enumerate() {
            match position.get_mut(v as usize) {
                Some(slot) if *slot == u32::MAX => *slot = q as u32,
                Some(_) => return Err(Error::invalid(format!("node {v} repeated in order"))),
                None => return Err(Error::NodeOutOfRange { node: v.into(), n }),
            }
        }
        Ok(PermutationMap { order, position })
    }
}

impl RoundMap for PermutationMap {
    fn domain(&self) -> usize {
        self.order.len()
    }

    fn value(&self, x: Node) -> u64 {
        u64::from(self.position[x as usize])
    }

    fn node(&self, y: u64) -> Node {
        self.order[y as usize]
    }

    fn order(&self) -> Vec<Node> {
        self.order.clone()
    }
}

/// `r` global trades plus the chunking parameters.
#[derive(Clone, Debug)]
pub struct RoundPlan<M = LcgMap> {
    pub maps: Vec<M>,
    /// Macrochunks per round.
    pub k: usize,
    /// Batches per macrochunk.
    pub z: usize,
    /// Microchunks per batch.
    pub p_threads: usize,
}

impl<M: RoundMap> RoundPlan<M> {
    pub fn new(maps: Vec<M>, k: usize, z: usize, p_threads: usize) -> Result<Self> {
        if k == 0 || z == 0 || p_threads == 0 {
            return Err(Error::invalid("k, z and p_threads must be at least 1"));
        }
        if let Some(first) = maps.first() {
            let n = first.domain();
            if maps.iter().any(|m| m.domain() != n) {
                return Err(Error::invalid("all maps must share one domain"));
            }
        }
        Ok(RoundPlan {
            maps,
            k,
            z,
            p_threads,
        })
    }

    /// Picks `k` from a memory budget (in messages) and `z` by default.
    pub fn auto(maps: Vec<M>, degrees: &DegreeSequence, p_threads: usize, mem_budget: u64) -> Result<Self> {
        let n = degrees.len() as u64;
        let slots = n.div_ceil(2).max(1);
        let k = choose_k(n.max(1), degrees.mean(), degrees.variance(), mem_budget, slots)?;
        let z = default_z(n, k, p_threads.max(1) as u64);
        Self::new(maps, k as usize, z as usize, p_threads.max(1))
    }

    pub fn rounds(&self) -> usize {
        self.maps.len()
    }

    /// The trades of all rounds in processing order, with one oracle round
    /// per global trade.
    pub fn trade_sequence(&self, n: usize) -> TradeSequence {
        let mut pairs = Vec::with_capacity(self.maps.len() * (n / 2));
        for m in &self.maps {
            let order = m.order();
            pairs.extend(order.chunks_exact(2).map(|c| TradePair { i: c[0], j: c[1] }));
        }
        TradeSequence::with_round_len(pairs, n / 2)
    }
}

impl RoundPlan<LcgMap> {
    /// `r` independently sampled linear congruential maps.
    pub fn sample_maps<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Vec<LcgMap>> {
        (0..r).map(|_| LcgMap::sample(n as u64, rng)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PgcbConfig {
    pub threads: usize,
    pub storage: Storage,
    /// Recover active nodes through the map's inverse; when false, nodes are
    /// taken from the auxiliary records instead.
    pub invertible: bool,
}

impl Default for PgcbConfig {
    fn default() -> Self {
        PgcbConfig {
            threads: 1,
            storage: Storage::Memory,
            invertible: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MacrochunkStat {
    pub round: usize,
    pub chunk: usize,
    pub slots: usize,
    /// Messages loaded from the chunk's queue.
    pub loaded: u64,
    /// Sum of degrees of the chunk's nodes.
    pub degree_sum: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PgcbStats {
    /// Edge messages sent before the first round.
    pub initial_messages: u64,
    /// Forwards within one microchunk.
    pub class_i: u64,
    /// Forwards between microchunks of one batch.
    pub class_ii: u64,
    /// Forwards to a later batch of the loaded macrochunk.
    pub class_iii_local: u64,
    /// Forwards to a later macrochunk or the next round, through a queue.
    pub class_iii_queued: u64,
    pub trades: u64,
    /// Unpaired last positions passed through (odd `n`).
    pub pass_through: u64,
    pub skipped: u64,
    pub steals: u64,
    pub max_steal_chain: u64,
    pub batches: u64,
    pub macrochunks: Vec<MacrochunkStat>,
}

impl PgcbStats {
    pub fn forwards(&self) -> u64 {
        self.class_i + self.class_ii + self.class_iii_local + self.class_iii_queued
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_map_round_trip() {
        let m = PermutationMap::new(vec![2, 0, 1]).unwrap();
        assert_eq!(m.value(2), 0);
        assert_eq!(m.node(2), 1);
        assert_eq!(m.order(), vec![2, 0, 1]);
        assert!(PermutationMap::new(vec![0, 0]).is_err());
        assert!(PermutationMap::new(vec![0, 2]).is_err());
    }

    #[test]
    fn plan_sequence_uses_round_keys() {
        let maps = vec![LcgMap::new(4, 1, 6).unwrap(), LcgMap::identity(6).unwrap()];
        let plan = RoundPlan::new(maps, 1, 1, 1).unwrap();
        let seq = plan.trade_sequence(6);
        let pairs: Vec<_> = seq.pairs().iter().map(|t| (t.i, t.j)).collect();
        assert_eq!(pairs, vec![(5, 0), (2, 4), (1, 3), (0, 1), (2, 3), (4, 5)]);
        assert_eq!(seq.key(4), (1, 1));
        assert!(RoundPlan::<LcgMap>::new(vec![], 0, 1, 1).is_err());
    }
}
