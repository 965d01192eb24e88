//! Inputs shared by the criterion benches.

use curveball::graph::{havel_hakimi, sample_powerlaw_degrees};
use curveball::pgcb::RoundPlan;
use curveball::{Graph, LcgMap, PowerlawSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Havel-Hakimi realization of a `Pld(a, b, 2)` sample.
pub fn pld_graph(n: usize, a: u32, b: u32, seed: u64) -> Graph {
    let spec = PowerlawSpec::new(a, b, 2.0).expect("valid spec");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = sample_powerlaw_degrees(&spec, n, &mut rng).expect("valid spec");
        if let Ok(g) = havel_hakimi(&d) {
            return g;
        }
    }
}

pub fn maps(n: usize, r: usize, seed: u64) -> Vec<LcgMap> {
    RoundPlan::sample_maps(n, r, &mut ChaCha8Rng::seed_from_u64(seed)).expect("n >= 1")
}
