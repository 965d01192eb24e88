use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::Edge;

/// Minimum series length per unit of thinning.
const MIN_SAMPLES: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependence {
    Independent,
    Correlated,
}

/// Which edges count towards the correlated fraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeUniverse {
    /// Edges of `G_0`.
    Initial,
    /// Every edge present in at least one recorded graph.
    #[default]
    Occurring,
}

impl std::str::FromStr for EdgeUniverse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "initial" => Ok(EdgeUniverse::Initial),
            "occurring" => Ok(EdgeUniverse::Occurring),
            _ => Err(Error::invalid(format!("unknown edge universe {s:?}"))),
        }
    }
}

/// Presence of one edge in `G_0, G_1, ...`, stored as the steps at which
/// it flips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupancySeries {
    pub initial: bool,
    pub toggles: Vec<u32>,
    pub len: u32,
}

impl OccupancySeries {
    pub fn from_bits(bits: &[bool]) -> Self {
        let toggles = (1..bits.len())
            .filter(|&t| bits[t] != bits[t - 1])
            .map(|t| t as u32)
            .collect();
        OccupancySeries {
            initial: bits.first().copied().unwrap_or(false),
            toggles,
            len: bits.len() as u32,
        }
    }

    pub fn get(&self, t: u32) -> bool {
        let flips = self.toggles.partition_point(|&x| x <= t);
        self.initial ^ (flips % 2 == 1)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|t| self.get(t)).collect()
    }

    pub fn thinned(&self, k: u64) -> ThinnedCounts {
        ThinnedCounts::new(self.initial, &self.toggles, self.len, k)
    }
}

/// Transition counts of the series `Z_0, Z_k, Z_2k, ...`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThinnedCounts {
    pub samples: u64,
    pub first: bool,
    /// `trans[a][b]`: number of `a -> b` steps.
    pub trans: [[u64; 2]; 2],
}

impl ThinnedCounts {
    /// Works run by run, so the cost is linear in the number of toggles.
    pub fn new(initial: bool, toggles: &[u32], len: u32, k: u64) -> Self {
        assert!(k >= 1);
        let mut c = ThinnedCounts {
            first: initial,
            ..Default::default()
        };
        let mut prev: Option<usize> = None;
        let mut start = 0u64;
        let bounds = toggles.iter().map(|&t| u64::from(t)).chain([u64::from(len)]);
        for (j, end) in bounds.enumerate() {
            let cnt = end.div_ceil(k) - start.div_ceil(k);
            if cnt > 0 {
                let x = usize::from(initial ^ (j % 2 == 1));
                if let Some(p) = prev {
                    c.trans[p][x] += 1;
                }
                c.trans[x][x] += cnt - 1;
                c.samples += cnt;
                prev = Some(x);
            }
            start = end;
        }
        c
    }

    fn transitions(&self) -> u64 {
        self.trans.iter().flatten().sum()
    }

    /// BIC (in units of negative log-likelihood) of the i.i.d. Bernoulli
    /// model and of the two-state Markov model, both scored on `Z_1..`.
    pub fn bic(&self) -> (f64, f64) {
        let t = self.transitions();
        let penalty = 0.5 * (t.max(1) as f64).ln();
        let ones = self.trans[0][1] + self.trans[1][1];
        let iid = xlogx_ratio(ones, t) + xlogx_ratio(t - ones, t);
        let markov: f64 = self
            .trans
            .iter()
            .map(|row| {
                let total = row[0] + row[1];
                xlogx_ratio(row[0], total) + xlogx_ratio(row[1], total)
            })
            .sum();
        (-iid + penalty, -markov + 2.0 * penalty)
    }

    pub fn classify(&self) -> Dependence {
        let (iid, markov) = self.bic();
        if iid <= markov {
            Dependence::Independent
        } else {
            Dependence::Correlated
        }
    }
}

/// `c * ln(c / total)` with `0 ln 0 = 0`.
fn xlogx_ratio(c: u64, total: u64) -> f64 {
    if c == 0 {
        0.0
    } else {
        c as f64 * (c as f64 / total as f64).ln()
    }
}

fn check_thinning(len: u32, k: u64) -> Result<()> {
    if k == 0 || u64::from(len) < MIN_SAMPLES * k {
        return Err(Error::invalid(format!(
            "thinning {k} needs a series of length >= {}, have {len}",
            MIN_SAMPLES * k.max(1)
        )));
    }
    Ok(())
}

pub fn classify_independent(series: &OccupancySeries, k: u64) -> Result<Dependence> {
    check_thinning(series.len, k)?;
    Ok(series.thinned(k).classify())
}

#[derive(Debug, Default)]
struct Trace {
    initial: bool,
    last: u32,
    /// LEB128-encoded gaps between toggles.
    bytes: Vec<u8>,
}

impl Trace {
    fn push(&mut self, t: u32) {
        let mut gap = t - self.last;
        self.last = t;
        loop {
            let b = (gap & 0x7f) as u8;
            gap >>= 7;
            if gap == 0 {
                self.bytes.push(b);
                break;
            }
            self.bytes.push(b | 0x80);
        }
    }

    fn decode(&self, out: &mut Vec<u32>) {
        out.clear();
        let (mut t, mut gap, mut shift) = (0u32, 0u32, 0);
        for &b in &self.bytes {
            gap |= u32::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                t += gap;
                out.push(t);
                gap = 0;
                shift = 0;
            } else {
                shift += 7;
            }
        }
    }
}

/// Streams sorted edge lists `G_0, G_1, ...` into per-edge run-length
/// encodings.
#[derive(Debug, Default)]
pub struct OccupancyRecorder {
    len: u32,
    prev: Vec<Edge>,
    traces: FxHashMap<u64, Trace>,
}

impl OccupancyRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of recorded graphs.
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn edges_seen(&self) -> usize {
        self.traces.len()
    }

    pub fn record(&mut self, edges: &[Edge]) {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let t = self.len;
        if t == 0 {
            for e in edges {
                self.traces.insert(
                    e.key(),
                    Trace {
                        initial: true,
                        ..Default::default()
                    },
                );
            }
        } else {
            let traces = &mut self.traces;
            let mut flip = |e: Edge| traces.entry(e.key()).or_default().push(t);
            let (a, b) = (&self.prev, edges);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => {
                        flip(a[i]);
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        flip(b[j]);
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                }
            }
            a[i..].iter().chain(&b[j..]).for_each(|&e| flip(e));
        }
        self.prev.clear();
        self.prev.extend_from_slice(edges);
        self.len += 1;
    }

    pub fn series(&self, e: Edge) -> Option<OccupancySeries> {
        let tr = self.traces.get(&e.key())?;
        let mut toggles = Vec::new();
        tr.decode(&mut toggles);
        Some(OccupancySeries {
            initial: tr.initial,
            toggles,
            len: self.len,
        })
    }

    /// Calls `f(edge, initial, toggles)` for every edge of `universe`.
    pub fn for_each(&self, universe: EdgeUniverse, mut f: impl FnMut(Edge, bool, &[u32])) {
        let mut buf = Vec::new();
        for (&key, tr) in &self.traces {
            if universe == EdgeUniverse::Initial && !tr.initial {
                continue;
            }
            tr.decode(&mut buf);
            f(Edge::from_key(key), tr.initial, &buf);
        }
    }
}

/// Fraction of correlated edges per thinning value.
#[derive(Clone, Debug, PartialEq)]
pub struct ThinningResult {
    pub ks: Vec<u64>,
    pub fractions: Vec<f64>,
    pub edges: usize,
}

impl ThinningResult {
    pub fn at(&self, k: u64) -> Option<f64> {
        self.ks.iter().position(|&x| x == k).map(|i| self.fractions[i])
    }
}

pub fn fraction_correlated(
    rec: &OccupancyRecorder,
    grid: &[u64],
    universe: EdgeUniverse,
) -> Result<ThinningResult> {
    if grid.is_empty() {
        return Err(Error::invalid("empty thinning grid"));
    }
    for &k in grid {
        check_thinning(rec.len(), k)?;
    }
    let mut correlated = vec![0u64; grid.len()];
    let mut edges = 0;
    rec.for_each(universe, |_, initial, toggles| {
        edges += 1;
        for (c, &k) in correlated.iter_mut().zip(grid) {
            if ThinnedCounts::new(initial, toggles, rec.len(), k).classify() == Dependence::Correlated {
                *c += 1;
            }
        }
    });
    let fractions = correlated
        .iter()
        .map(|&c| if edges == 0 { 0.0 } else { c as f64 / edges as f64 })
        .collect();
    Ok(ThinningResult {
        ks: grid.to_vec(),
        fractions,
        edges,
    })
}
