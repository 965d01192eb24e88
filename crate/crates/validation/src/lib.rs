//! Instance generators and reporting shared by the acceptance suite.

use std::fmt;
use std::time::{Duration, Instant};

use curveball::graph::{havel_hakimi, sample_powerlaw_degrees};
use curveball::mixing::{Chain, SuperStep};
use curveball::{DegreeSequence, Graph, PowerlawSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Havel-Hakimi realization of a powerlaw sample; resamples until graphical.
pub fn pld_graph(n: usize, spec: PowerlawSpec, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = sample_powerlaw_degrees(&spec, n, &mut rng).expect("valid spec");
        if let Ok(g) = havel_hakimi(&d) {
            return g;
        }
    }
}

pub fn regular_graph(n: usize, d: u32) -> Graph {
    havel_hakimi(&DegreeSequence::new(vec![d; n])).expect("graphical regular sequence")
}

/// Applies `steps` random global trades.
pub fn scramble(g: &Graph, steps: u64, seed: u64) -> Graph {
    let mut chain = Chain::new(g, SuperStep::CbGlobal, seed).expect("n >= 2");
    for _ in 0..steps {
        chain.step();
    }
    chain.graph()
}

/// Outcome of one acceptance criterion.
#[derive(Debug)]
pub struct Verdict {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Verdict {
    /// Runs `check`, which returns `(pass, detail)`, and also requires it to
    /// finish within `budget`.
    pub fn run(id: &'static str, budget: Duration, check: impl FnOnce() -> (bool, String)) -> Self {
        let start = Instant::now();
        let (pass, detail) = check();
        let elapsed = start.elapsed();
        Verdict {
            id,
            pass: pass && elapsed <= budget,
            detail,
            elapsed,
            budget,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} [{:.1}s of {}s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}
