mod common;

use common::gnp;
use curveball::graph::{havel_hakimi, parse_edge_list, write_edge_list_to};
use curveball::mixing::enumerate_state_space;
use curveball::DegreeSequence;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn havel_hakimi_realizes_degrees(n in 1usize..60, p in 0.0f64..1.0, seed: u64) {
        let d = gnp(n, p, seed).degrees();
        let g = havel_hakimi(&d).unwrap();
        prop_assert_eq!(g.degrees(), d);
    }

    #[test]
    fn graphical_test_matches_enumeration(d in prop::collection::vec(0u32..6, 0..7)) {
        let d: Vec<u32> = d.iter().map(|&x| x.min(d.len().saturating_sub(1) as u32)).collect();
        let seq = DegreeSequence::new(d);
        let realizable = !enumerate_state_space(&seq).unwrap().is_empty();
        prop_assert_eq!(seq.is_graphical(), realizable);
        prop_assert_eq!(havel_hakimi(&seq).is_ok(), realizable);
    }

    #[test]
    fn edge_list_round_trip(n in 0usize..40, p in 0.0f64..1.0, seed: u64) {
        let g = gnp(n, p, seed);
        let mut buf = Vec::new();
        write_edge_list_to(&g, &mut buf).unwrap();
        prop_assert_eq!(parse_edge_list(buf.as_slice()).unwrap(), g);
    }
}
