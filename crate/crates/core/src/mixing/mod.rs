//! Quality experiments: Markov chains over super steps, thinning-based
//! independence classification, swap fractions and a brute-force
//! uniformity oracle.

mod occupancy;
mod states;

pub use occupancy::{
    classify_independent, fraction_correlated, Dependence, EdgeUniverse, OccupancyRecorder,
    OccupancySeries, ThinnedCounts, ThinningResult,
};
pub use states::{enumerate_state_space, uniformity_test, UniformityReport, MAX_ENUMERATED};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::esmc::EdgeSwitcher;
use crate::graph::{Edge, Graph};
use crate::imcb::run_imcb_with_stats;
use crate::lcg::LcgMap;
use crate::trade::{expand_global_trade, GlobalTradeDescriptor, TradeRandomnessOracle, TradeSequence};

/// What one super step does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuperStep {
    /// `n/2` trades between uniformly drawn node pairs.
    CbUniform,
    /// One global trade ordered by a random linear congruential map.
    CbGlobal,
    /// `m` edge switch proposals.
    Esmc,
}

impl SuperStep {
    pub const ALL: [SuperStep; 3] = [SuperStep::CbUniform, SuperStep::CbGlobal, SuperStep::Esmc];

    pub fn name(self) -> &'static str {
        match self {
            SuperStep::CbUniform => "cb-uniform",
            SuperStep::CbGlobal => "cb-global",
            SuperStep::Esmc => "esmc",
        }
    }
}

impl fmt::Display for SuperStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuperStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuperStep::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

/// Work counters of a chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainCounters {
    pub steps: u64,
    pub trades: u64,
    pub proposals: u64,
    pub accepted: u64,
    /// Neighbors that changed owner, and `deg(u) + deg(v)` summed over trades.
    pub moved: u64,
    pub slots: u64,
}

impl ChainCounters {
    pub fn swap_fraction(&self) -> f64 {
        if self.slots == 0 {
            0.0
        } else {
            self.moved as f64 / self.slots as f64
        }
    }
}

enum State {
    Trades(Graph),
    Switches(EdgeSwitcher),
}

/// A Markov chain over graphs advancing one super step at a time. Trade
/// steps run through the in-memory engine with a fresh oracle seed drawn
/// from the chain's generator.
pub struct Chain {
    kind: SuperStep,
    m: usize,
    state: State,
    rng: ChaCha8Rng,
    counters: ChainCounters,
}

impl Chain {
    pub fn new(graph: &Graph, kind: SuperStep, seed: u64) -> Result<Self> {
        if kind != SuperStep::Esmc && graph.n() < 2 {
            return Err(Error::invalid("trades need n >= 2"));
        }
        let state = match kind {
            SuperStep::Esmc => State::Switches(EdgeSwitcher::new(graph)),
            _ => State::Trades(graph.clone()),
        };
        Ok(Chain {
            kind,
            m: graph.m(),
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            counters: ChainCounters::default(),
        })
    }

    pub fn kind(&self) -> SuperStep {
        self.kind
    }

    pub fn counters(&self) -> ChainCounters {
        self.counters
    }

    /// The trades and oracle of the next trade super step.
    fn next_trades(&mut self, n: usize) -> (TradeSequence, TradeRandomnessOracle) {
        let rng = &mut self.rng;
        let seq = match self.kind {
            SuperStep::CbUniform => TradeSequence::uniform(n, n / 2, rng).expect("n >= 2"),
            _ => {
                let map = LcgMap::sample(n as u64, rng).expect("n >= 2");
                expand_global_trade(&GlobalTradeDescriptor::Lcg(map))
            }
        };
        (seq, TradeRandomnessOracle::new(rng.random()))
    }

    pub fn step(&mut self) {
        self.counters.steps += 1;
        match &mut self.state {
            State::Switches(sw) => {
                for _ in 0..self.m {
                    sw.step(&mut self.rng);
                }
                self.counters.proposals = sw.proposals();
                self.counters.accepted = sw.accepted();
            }
            State::Trades(g) => {
                let n = g.n();
                let (seq, oracle) = self.next_trades(n);
                let State::Trades(g) = &mut self.state else { unreachable!() };
                let (next, st) = run_imcb_with_stats(g, &seq, &oracle).expect("trades stay in range");
                *g = next;
                let c = &mut self.counters;
                c.trades += st.trades;
                c.moved += st.moved;
                c.slots += st.slots;
            }
        }
    }

    pub fn graph(&self) -> Graph {
        match &self.state {
            State::Trades(g) => g.clone(),
            State::Switches(sw) => sw.graph(),
        }
    }

    /// Current edges, sorted.
    pub fn sorted_edges(&self, out: &mut Vec<Edge>) {
        out.clear();
        match &self.state {
            State::Trades(g) => out.extend_from_slice(g.edges()),
            State::Switches(sw) => {
                out.extend_from_slice(sw.edges());
                out.sort_unstable();
            }
        }
    }
}

/// Runs `steps` super steps and calls `visit(t, edges)` for `G_0 ..= G_steps`
/// with sorted edges.
pub fn run_chain(
    graph: &Graph,
    kind: SuperStep,
    steps: u64,
    seed: u64,
    mut visit: impl FnMut(u64, &[Edge]),
) -> Result<ChainCounters> {
    let mut chain = Chain::new(graph, kind, seed)?;
    let mut buf = Vec::with_capacity(graph.m());
    visit(0, graph.edges());
    for t in 1..=steps {
        chain.step();
        chain.sorted_edges(&mut buf);
        visit(t, &buf);
    }
    Ok(chain.counters())
}

/// Records one chain per algorithm, each on its own thread with seed
/// `seed + index`, and classifies the series on `grid`.
pub fn mixing_experiment(
    graph: &Graph,
    algos: &[SuperStep],
    steps: u64,
    grid: &[u64],
    universe: EdgeUniverse,
    seed: u64,
) -> Result<Vec<(SuperStep, ThinningResult)>> {
    if algos.is_empty() {
        return Err(Error::invalid("no algorithms given"));
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = algos
            .iter()
            .enumerate()
            .map(|(i, &algo)| {
                s.spawn(move || -> Result<(SuperStep, ThinningResult)> {
                    let mut rec = OccupancyRecorder::new();
                    run_chain(graph, algo, steps, seed.wrapping_add(i as u64), |_, e| {
                        rec.record(e)
                    })?;
                    Ok((algo, fraction_correlated(&rec, grid, universe)?))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}

/// Swap-fraction study modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapMode {
    Uniform,
    Global,
}

impl SwapMode {
    pub fn name(self) -> &'static str {
        match self {
            SwapMode::Uniform => "uniform",
            SwapMode::Global => "global",
        }
    }
}

/// Moved neighbors over `deg(u) + deg(v)`, summed over one super step of
/// `n/2` uniform trades or one global trade.
pub fn swap_fraction(graph: &Graph, mode: SwapMode, seed: u64) -> Result<f64> {
    let kind = match mode {
        SwapMode::Uniform => SuperStep::CbUniform,
        SwapMode::Global => SuperStep::CbGlobal,
    };
    let mut chain = Chain::new(graph, kind, seed)?;
    chain.step();
    Ok(chain.counters().swap_fraction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trade::apply_naive;

    fn cycle(n: u32) -> Graph {
        Graph::from_pairs(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn zero_steps_emits_initial_graph() {
        let g = cycle(6);
        let mut seen = Vec::new();
        run_chain(&g, SuperStep::CbGlobal, 0, 1, |t, e| seen.push((t, e.to_vec()))).unwrap();
        assert_eq!(seen, vec![(0, g.edges().to_vec())]);
    }

    #[test]
    fn esmc_step_counts_m_proposals() {
        let g = cycle(100);
        let c = run_chain(&g, SuperStep::Esmc, 3, 1, |_, _| {}).unwrap();
        assert_eq!(c.proposals, 3 * g.m() as u64);
    }

    #[test]
    fn global_step_is_one_global_trade() {
        let g = cycle(9);
        let mut chain = Chain::new(&g, SuperStep::CbGlobal, 11).unwrap();
        chain.step();
        assert_eq!(chain.counters().trades, 4);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let map = LcgMap::sample(9, &mut rng).unwrap();
        let seq = expand_global_trade(&GlobalTradeDescriptor::Lcg(map));
        let oracle = TradeRandomnessOracle::new(rng.random());
        assert_eq!(chain.graph(), apply_naive(&g, &seq, &oracle));
    }

    #[test]
    fn sorted_edges_match_graph() {
        let g = cycle(12);
        for kind in SuperStep::ALL {
            let mut chain = Chain::new(&g, kind, 5).unwrap();
            let mut buf = Vec::new();
            for _ in 0..5 {
                chain.step();
                chain.sorted_edges(&mut buf);
                assert_eq!(buf, chain.graph().edges());
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for a in SuperStep::ALL {
            assert_eq!(a.name().parse::<SuperStep>().unwrap(), a);
        }
        assert!("es".parse::<SuperStep>().is_err());
    }

    #[test]
    fn fully_shared_neighbourhoods_swap_nothing() {
        let g = Graph::from_pairs(2, [(0, 1)]).unwrap();
        assert_eq!(swap_fraction(&g, SwapMode::Global, 1).unwrap(), 0.0);
        let k4 = Graph::from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        for mode in [SwapMode::Uniform, SwapMode::Global] {
            assert_eq!(swap_fraction(&k4, mode, 3).unwrap(), 0.0);
        }
    }
}
