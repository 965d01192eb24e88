mod common;

use common::{gnp, rng};
use curveball::imcb::run_imcb;
use curveball::pgcb::{run_empgcb, PgcbConfig, RoundPlan};
use curveball::tfp::Storage;
use curveball::TradeRandomnessOracle;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn pgcb_matches_imcb(
        n in 2usize..48,
        p in 0.0f64..0.7,
        r in 0usize..5,
        k in 1usize..8,
        z in 1usize..5,
        pt in 1usize..5,
        threads in 1usize..5,
        invertible: bool,
        file: bool,
        seed: u64,
    ) {
        let g = gnp(n, p, seed);
        let maps = RoundPlan::sample_maps(n, r, &mut rng(seed)).unwrap();
        let plan = RoundPlan::new(maps, k, z, pt).unwrap();
        let o = TradeRandomnessOracle::new(seed ^ 7);
        let storage = if file { Storage::temp(32, 4).unwrap() } else { Storage::Memory };
        let config = PgcbConfig { threads, storage, invertible };
        let (out, stats) = run_empgcb(&g, &plan, &o, &config).unwrap();
        prop_assert_eq!(out, run_imcb(&g, &plan.trade_sequence(n), &o).unwrap());
        prop_assert_eq!(stats.trades, (r * (n / 2)) as u64);
        prop_assert_eq!(stats.pass_through, (r * (n % 2)) as u64);
    }
}

#[test]
fn rejects_mismatched_domain() {
    let g = gnp(10, 0.3, 1);
    let maps = RoundPlan::sample_maps(11, 1, &mut rng(1)).unwrap();
    let plan = RoundPlan::new(maps, 1, 1, 1).unwrap();
    assert!(run_empgcb(&g, &plan, &TradeRandomnessOracle::new(1), &PgcbConfig::default()).is_err());
}
