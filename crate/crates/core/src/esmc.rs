//! Edge switching Markov chain.

use rand::Rng;
use rustc_hash::FxHashSet;

use crate::graph::{Edge, Graph};

/// One switch proposal: edge indices `e1`, `e2` and direction `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapStep {
    pub e1: usize,
    pub e2: usize,
    pub d: bool,
}

impl SwapStep {
    /// Draws `e1`, `e2` with replacement; a repeated edge yields `None`.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Option<Self> {
        let e1 = rng.random_range(0..m);
        let e2 = rng.random_range(0..m);
        let d = rng.random::<bool>();
        (e1 != e2).then_some(SwapStep { e1, e2, d })
    }
}

/// Mutable edge list plus membership set.
#[derive(Clone, Debug)]
pub struct EdgeSwitcher {
    n: usize,
    edges: Vec<Edge>,
    present: FxHashSet<u64>,
    proposals: u64,
    accepted: u64,
}

impl EdgeSwitcher {
    pub fn new(graph: &Graph) -> Self {
        EdgeSwitcher {
            n: graph.n(),
            edges: graph.edges().to_vec(),
            present: graph.edges().iter().map(|e| e.key()).collect(),
            proposals: 0,
            accepted: 0,
        }
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Edges in slot order (not sorted).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.clone()).expect("switching keeps the graph simple")
    }

    /// Applies `s` if the result stays simple.
    pub fn apply(&mut self, s: SwapStep) -> bool {
        self.proposals += 1;
        if s.e1 == s.e2 {
            return false;
        }
        let (Edge { u: u1, v: v1 }, Edge { u: u2, v: v2 }) = (self.edges[s.e1], self.edges[s.e2]);
        let (a, b) = if s.d {
            ((u1, v2), (v1, u2))
        } else {
            ((u1, u2), (v1, v2))
        };
        if a.0 == a.1 || b.0 == b.1 {
            return false;
        }
        let (a, b) = (Edge::new(a.0, a.1), Edge::new(b.0, b.1));
        if self.present.contains(&a.key()) || self.present.contains(&b.key()) {
            return false;
        }
        self.present.remove(&self.edges[s.e1].key());
        self.present.remove(&self.edges[s.e2].key());
        self.present.insert(a.key());
        self.present.insert(b.key());
        self.edges[s.e1] = a;
        self.edges[s.e2] = b;
        self.accepted += 1;
        true
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.edges.is_empty() {
            self.proposals += 1;
            return false;
        }
        match SwapStep::sample(self.edges.len(), rng) {
            Some(s) => self.apply(s),
            None => {
                self.proposals += 1;
                false
            }
        }
    }
}

/// Runs `steps` switch proposals; returns the result and the accepted count.
pub fn run_esmc<R: Rng + ?Sized>(graph: &Graph, steps: u64, rng: &mut R) -> (Graph, u64) {
    let mut sw = EdgeSwitcher::new(graph);
    for _ in 0..steps {
        sw.step(rng);
    }
    let accepted = sw.accepted();
    (sw.graph(), accepted)
}
