use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use curveball::emcb::{run_emcb, EmcbConfig};
use curveball::esmc::EdgeSwitcher;
use curveball::graph::{
    havel_hakimi, read_degree_sequence, read_edge_list, sample_powerlaw_degrees, write_edge_list,
};
use curveball::imcb::run_imcb_with_stats;
use curveball::mixing::{
    mixing_experiment, swap_fraction, Chain, EdgeUniverse, SuperStep, SwapMode,
};
use curveball::pgcb::{
    default_z, estimate_batch_dependencies, estimate_max_macrochunk, run_empgcb, PgcbConfig,
    RoundPlan,
};
use curveball::tfp::Storage;
use curveball::{DegreeSequence, Graph, PowerlawSpec, TradeRandomnessOracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{
    Algo, DegreeArgs, EstimateArgs, GenArgs, MixArgs, Preset, RandomizeArgs, SwapfracArgs,
};
use crate::error::{usage, CliError, Result};

/// Block size (items) of file-backed storage, capped at half the memory.
const BLOCK: u64 = 256;

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// CSV text: `#` comment lines, a header row, then `rows`.
fn csv(comments: &[String], header: &str, rows: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    let _ = writeln!(s, "{header}");
    for r in rows {
        let _ = writeln!(s, "{r}");
    }
    s
}

impl DegreeArgs {
    fn spec(&self, n: usize) -> Result<Option<PowerlawSpec>> {
        let (a, b) = match (self.preset, self.pld_a, self.pld_b) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(usage("--preset conflicts with --pld-a/--pld-b"))
            }
            (Some(Preset::Lin), None, None) => (10, (n / 20) as u32),
            (Some(Preset::Const), None, None) => (50, 10_000),
            (None, Some(a), Some(b)) => (a, b),
            (None, None, None) => return Ok(None),
            _ => return Err(usage("--pld-a and --pld-b go together")),
        };
        Ok(Some(PowerlawSpec::new(a, b, self.gamma)?))
    }

    fn describe(&self, n: Option<usize>) -> String {
        match (&self.degrees, n.map(|n| self.spec(n))) {
            (Some(p), _) => format!("degrees={}", p.display()),
            (None, Some(Ok(Some(s)))) => format!("pld=({},{},{})", s.a, s.b, s.gamma),
            _ => "degrees=none".into(),
        }
    }

    /// The degree sequence from a file, or sampled for `n` nodes.
    fn sample(&self, n: Option<usize>, rng: &mut ChaCha8Rng) -> Result<DegreeSequence> {
        if let Some(path) = &self.degrees {
            let d = read_degree_sequence(path)?;
            if n.is_some_and(|n| n != d.len()) {
                return Err(usage("--nodes disagrees with the degree file"));
            }
            return Ok(d);
        }
        let n = n.ok_or_else(|| usage("--nodes is required without --degrees"))?;
        let spec = self
            .spec(n)?
            .ok_or_else(|| usage("give --preset, --pld-a/--pld-b or --degrees"))?;
        Ok(sample_powerlaw_degrees(&spec, n, rng)?)
    }

    fn graph(&self, n: Option<usize>, seed: u64) -> Result<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.sample(n, &mut rng)?;
        Ok(havel_hakimi(&d)?)
    }
}

pub fn gen(a: GenArgs) -> Result<()> {
    let g = a.degrees.graph(a.nodes, a.seed)?;
    write_edge_list(&g, &a.out)?;
    println!("n={} m={} d_max={}", g.n(), g.m(), g.max_degree());
    Ok(())
}

fn storage(engine: &crate::args::EngineArgs) -> Result<Storage> {
    match &engine.scratch {
        None => Ok(Storage::Memory),
        Some(dir) => {
            let mem = engine.mem_budget;
            let block = BLOCK.min(mem / 2).max(1);
            Ok(Storage::file(dir, mem as usize, block as usize)?)
        }
    }
}

fn stats_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".stats.csv");
    PathBuf::from(s)
}

pub fn randomize(a: RandomizeArgs) -> Result<()> {
    let g = read_edge_list(&a.input)?;
    let (n, r) = (g.n(), a.super_steps);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let oracle = TradeRandomnessOracle::new(a.seed);
    let storage = storage(&a.engine)?;
    let mut counters: Vec<(&str, u64)> = Vec::new();
    let start = Instant::now();

    let out = if a.algo == Algo::Esmc {
        let mut sw = EdgeSwitcher::new(&g);
        for _ in 0..r * g.m() as u64 {
            sw.step(&mut rng);
        }
        counters.push(("proposals", sw.proposals()));
        counters.push(("accepted", sw.accepted()));
        sw.graph()
    } else {
        let maps = if r == 0 {
            Vec::new()
        } else {
            RoundPlan::sample_maps(n, r as usize, &mut rng)?
        };
        let threads = a.engine.threads.max(1);
        let plan = match a.engine.k {
            Some(k) => {
                let z = a.engine.z.unwrap_or_else(|| default_z(n as u64, k as u64, threads as u64) as usize);
                RoundPlan::new(maps, k, z, threads)?
            }
            None => {
                let mut plan = RoundPlan::auto(maps, &g.degrees(), threads, a.engine.mem_budget)?;
                if let Some(z) = a.engine.z {
                    plan.z = z;
                }
                plan
            }
        };
        match a.algo {
            Algo::Imcb => {
                let (h, st) = run_imcb_with_stats(&g, &plan.trade_sequence(n), &oracle)?;
                counters.extend([("trades", st.trades), ("gathered", st.gathered), ("pushes", st.pushes)]);
                h
            }
            Algo::Emcb => {
                let (h, st) = run_emcb(&g, &plan.trade_sequence(n), &oracle, &EmcbConfig::new(storage.clone()))?;
                counters.extend([
                    ("edge_messages", st.edge_messages),
                    ("finalized_direct", st.finalized_direct),
                    ("finalized_by_trades", st.finalized_by_trades),
                ]);
                h
            }
            _ => {
                let config = PgcbConfig {
                    threads,
                    storage: storage.clone(),
                    invertible: true,
                };
                let (h, st) = run_empgcb(&g, &plan, &oracle, &config)?;
                counters.extend([
                    ("k", plan.k as u64),
                    ("z", plan.z as u64),
                    ("trades", st.trades),
                    ("class_i", st.class_i),
                    ("class_ii", st.class_ii),
                    ("class_iii_local", st.class_iii_local),
                    ("class_iii_queued", st.class_iii_queued),
                    ("steals", st.steals),
                    ("max_steal_chain", st.max_steal_chain),
                ]);
                h
            }
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    write_edge_list(&out, &a.out)?;

    if let Some(m) = storage.meter() {
        counters.extend([("io_reads", m.reads()), ("io_writes", m.writes())]);
    }
    let rows: Vec<String> = counters.iter().map(|(k, v)| format!("{k},{v}")).collect();
    let comments = [
        format!("curveball randomize algo={:?} super_steps={r} seed={}", a.algo, a.seed).to_lowercase(),
        format!("input={} n={n} m={}", a.input.display(), g.m()),
        format!("seconds={seconds:.6}"),
    ];
    write_file(&stats_path(&a.out), &csv(&comments, "counter,value", &rows))
}

/// `1, 2, 3, 4, 6, 8, 12, ...` up to `max`.
fn default_grid(max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (0..40)
        .flat_map(|i| [1u64 << i, 3u64 << i])
        .filter(|&k| k <= max)
        .collect();
    grid.sort_unstable();
    grid.dedup();
    grid
}

pub fn mix(a: MixArgs) -> Result<()> {
    if a.algo.is_empty() {
        return Err(usage("--algo needs at least one of cb-uniform, cb-global, esmc"));
    }
    let algos = a
        .algo
        .iter()
        .map(|s| s.parse::<SuperStep>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let universe: EdgeUniverse = a.edge_universe.parse().map_err(|e: curveball::Error| usage(e.to_string()))?;
    let (g, source) = match &a.input {
        Some(p) => (read_edge_list(p)?, format!("input={}", p.display())),
        None => (a.degrees.graph(a.nodes, a.seed)?, a.degrees.describe(a.nodes)),
    };
    let grid = match a.thin_grid {
        Some(grid) => grid,
        None => default_grid((a.super_steps + 1) / 10),
    };
    if grid.is_empty() {
        return Err(usage("empty thinning grid"));
    }
    let results = mixing_experiment(&g, &algos, a.super_steps, &grid, universe, a.seed)?;
    let mut rows = Vec::new();
    for (algo, r) in &results {
        for (k, f) in r.ks.iter().zip(&r.fractions) {
            rows.push(format!("{algo},{k},{f}"));
        }
    }
    let comments = [
        format!("curveball mix seed={} super_steps={} universe={universe:?}", a.seed, a.super_steps).to_lowercase(),
        format!("{source} n={} m={}", g.n(), g.m()),
        format!(
            "chain seeds: {}",
            algos
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{s}={}", a.seed.wrapping_add(i as u64)))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ];
    write_file(&a.out, &csv(&comments, "algorithm,k,fraction_correlated", &rows))
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let mut rows = Vec::new();
    let moments = match (&a.degrees.degrees, a.nodes) {
        (Some(path), _) => {
            let d = read_degree_sequence(path)?;
            Some((d.len() as u64, d.mean(), d.variance()))
        }
        (None, Some(n)) => a.degrees.spec(n)?.map(|s| (n as u64, s.mean(), s.variance())),
        (None, None) => None,
    };
    if let Some((n, mean, var)) = moments {
        let e = estimate_max_macrochunk(n, a.k, mean, var)?;
        rows.extend([
            format!("macrochunk_mean,{}", e.mean),
            format!("macrochunk_deviation,{}", e.deviation),
            format!("macrochunk_deviation_from_var_s1,{}", e.deviation_from_var_s1),
            format!("macrochunk_expected_upper,{}", e.expected_upper),
            format!("macrochunk_variance_upper,{}", e.variance_upper),
        ]);
    }
    let m = match (a.edges, moments) {
        (Some(m), _) => m,
        (None, Some((n, mean, _))) => (n as f64 * mean / 2.0).round() as u64,
        (None, None) => return Err(usage("give --edges or a node count with a degree source")),
    };
    let n = moments.map_or(2 * m, |x| x.0);
    let z = a.z.unwrap_or_else(|| default_z(n, a.k, a.threads));
    let b = estimate_batch_dependencies(m, a.k, z, a.threads)?;
    rows.extend([
        format!("edges,{m}"),
        format!("z,{z}"),
        format!("avg_batch_msgs,{}", b.avg_batch_msgs),
        format!("critical_msgs,{}", b.critical_msgs),
    ]);
    let comments = [format!("curveball estimate k={} threads={}", a.k, a.threads)];
    let body = csv(&comments, "quantity,value", &rows);
    match &a.out {
        Some(p) => write_file(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

pub fn swapfrac(a: SwapfracArgs) -> Result<()> {
    let mut rows = Vec::new();
    for &n in &a.nodes {
        let seed = a.seed.wrapping_add(n as u64);
        let g = match a.regular {
            Some(d) => havel_hakimi(&DegreeSequence::new(vec![d; n]))?,
            None => a.degrees.graph(Some(n), seed)?,
        };
        let mut chain = Chain::new(&g, SuperStep::CbGlobal, seed)?;
        for _ in 0..a.burn_in {
            chain.step();
        }
        let g = chain.graph();
        for mode in [SwapMode::Global, SwapMode::Uniform] {
            rows.push(format!("{n},{},{}", mode.name(), swap_fraction(&g, mode, seed)?));
        }
    }
    let family = match a.regular {
        Some(d) => format!("regular={d}"),
        None => a.degrees.describe(a.nodes.first().copied()),
    };
    let comments = [format!(
        "curveball swapfrac seed={} burn_in={} {family} (per-n seed = seed + n)",
        a.seed, a.burn_in
    )];
    write_file(&a.out, &csv(&comments, "n,mode,swap_fraction", &rows))
}
