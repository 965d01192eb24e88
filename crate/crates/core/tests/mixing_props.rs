mod common;

use common::rng;
use curveball::esmc::{EdgeSwitcher, SwapStep};
use curveball::mixing::{classify_independent, enumerate_state_space, OccupancySeries};
use curveball::trade::{AdjacencyLists, Trader};
use curveball::{DegreeSequence, Graph, Node, TradePair};
use proptest::prelude::*;
use rand::SeedableRng;

/// Every outcome of every single trade and switch from `g`.
fn neighbours(g: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    let m = g.m();
    for e1 in 0..m {
        for e2 in 0..m {
            for d in [false, true] {
                let mut sw = EdgeSwitcher::new(g);
                if sw.apply(SwapStep { e1, e2, d }) {
                    out.push(sw.graph());
                }
            }
        }
    }
    let n = g.n() as Node;
    for i in 0..n {
        for j in i + 1..n {
            for seed in 0..16 {
                let mut adj = AdjacencyLists::from_graph(g);
                let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                adj.apply_trade(TradePair { i, j }, &mut r, &mut Trader::new());
                out.push(adj.to_graph());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn state_space_is_closed(d in prop::collection::vec(0u32..4, 2..7)) {
        let seq = DegreeSequence::new(d);
        let states = enumerate_state_space(&seq).unwrap();
        for g in &states {
            prop_assert_eq!(g.degrees(), seq.clone());
            for h in neighbours(g) {
                prop_assert!(states.binary_search_by(|s| s.edges().cmp(h.edges())).is_ok());
            }
        }
    }

    #[test]
    fn classification_ignores_relabelling(bits in prop::collection::vec(any::<bool>(), 40..400), k in 1u64..4) {
        let flipped: Vec<bool> = bits.iter().map(|b| !b).collect();
        prop_assert_eq!(
            classify_independent(&OccupancySeries::from_bits(&bits), k).unwrap(),
            classify_independent(&OccupancySeries::from_bits(&flipped), k).unwrap()
        );
    }
}

#[test]
fn switching_keeps_simple_and_degrees() {
    let g = common::gnp(30, 0.2, 4);
    let mut sw = EdgeSwitcher::new(&g);
    let mut r = rng(4);
    for _ in 0..20_000 {
        sw.step(&mut r);
    }
    assert!(sw.accepted() > 0);
    common::assert_same_degrees(&sw.graph(), &g);
}
