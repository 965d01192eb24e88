mod common;

use common::{pld_graph, rng};
use curveball::pgcb::{
    estimate_batch_dependencies, estimate_max_macrochunk, run_empgcb, PgcbConfig, RoundPlan,
};
use curveball::TradeRandomnessOracle;
use rand::seq::SliceRandom;
use rand::Rng;

/// Mean over random partitions of the largest of `k` equal parts' degree sums.
fn empirical_max_part(n: usize, k: usize, trials: usize) -> f64 {
    let mut r = rng(11);
    let mut total = 0u64;
    let mut degrees: Vec<u64> = Vec::with_capacity(n);
    for _ in 0..trials {
        degrees.clear();
        degrees.extend((0..n).map(|_| r.random_range(1..=9u64)));
        degrees.shuffle(&mut r);
        let part = n.div_ceil(k);
        total += degrees.chunks(part).map(|c| c.iter().sum::<u64>()).max().unwrap();
    }
    total as f64 / trials as f64
}

#[test]
fn macrochunk_estimate_against_random_partitions() {
    let (n, k) = (10_000u64, 16u64);
    // uniform on {1, ..., 9}
    let (mean, var) = (5.0, (81.0 - 1.0) / 12.0);
    let est = estimate_max_macrochunk(n, k, mean, var).unwrap();
    let observed = empirical_max_part(n as usize, k as usize, 10_000);
    assert!(est.mean < observed);
    assert!(
        est.mean + est.deviation_from_var_s1 >= observed,
        "{} < {observed}",
        est.mean + est.deviation_from_var_s1
    );
    // the closed form's deviation term is half of the one above
    assert!(est.expected_upper < est.mean + est.deviation_from_var_s1);
}

#[test]
fn measured_batch_dependencies_track_estimate() {
    let (n, k, z, p) = (1000usize, 4usize, 8usize, 4usize);
    let runs = 100u64;
    let rounds = 2usize;
    let mut measured = 0u64;
    let mut expected = 0.0;
    for seed in 0..runs {
        let g = pld_graph(n, 5, 50, seed);
        let maps = RoundPlan::sample_maps(n, rounds, &mut rng(seed)).unwrap();
        let plan = RoundPlan::new(maps, k, z, p).unwrap();
        let config = PgcbConfig { threads: p, ..PgcbConfig::default() };
        let (_, stats) =
            run_empgcb(&g, &plan, &TradeRandomnessOracle::new(seed), &config).unwrap();
        measured += stats.class_ii;
        let est = estimate_batch_dependencies(g.m() as u64, k as u64, z as u64, p as u64).unwrap();
        expected += est.critical_msgs * (k * z * rounds) as f64;
    }
    let ratio = measured as f64 / expected;
    assert!((1.0 / 3.0..=3.0).contains(&ratio), "measured {measured}, expected {expected:.1}");
}
