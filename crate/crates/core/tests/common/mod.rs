#![allow(dead_code)]

use curveball::graph::{havel_hakimi, sample_powerlaw_degrees};
use curveball::{Graph, Node, PowerlawSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut pairs = Vec::new();
    for u in 0..n as Node {
        for v in u + 1..n as Node {
            if r.random_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_pairs(n, pairs).unwrap()
}

/// Havel-Hakimi realization of a powerlaw degree sample, retrying until the
/// sample is graphical.
pub fn pld_graph(n: usize, a: u32, b: u32, seed: u64) -> Graph {
    let spec = PowerlawSpec::new(a, b, 2.0).unwrap();
    let mut r = rng(seed);
    loop {
        let d = sample_powerlaw_degrees(&spec, n, &mut r).unwrap();
        if let Ok(g) = havel_hakimi(&d) {
            return g;
        }
    }
}

pub fn assert_same_degrees(a: &Graph, b: &Graph) {
    assert_eq!(a.n(), b.n());
    assert_eq!(a.degrees(), b.degrees());
}
