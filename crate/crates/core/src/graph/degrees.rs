use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{Edge, Graph, Node};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&d| u64::from(d)).sum()
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.sum() as f64 / self.0.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        let mean = self.mean();
        self.0
            .iter()
            .map(|&d| (f64::from(d) - mean).powi(2))
            .sum::<f64>()
            / self.0.len() as f64
    }

    /// Erdős–Gallai test. Returns a description of the first violation.
    pub fn check_graphical(&self) -> std::result::Result<(), String> {
        let n = self.0.len();
        if self.sum() % 2 == 1 {
            return Err(format!("degree sum {} is odd", self.sum()));
        }
        if let Some((v, &d)) = self.0.iter().enumerate().find(|(_, &d)| d as usize >= n) {
            return Err(format!("node {v} has degree {d} >= n = {n}"));
        }
        let mut d: Vec<u64> = self.0.iter().map(|&x| u64::from(x)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = vec![0u64; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + d[i];
        }
        // at_least[k] = number of entries with degree >= k
        let mut at_least = vec![0usize; n + 2];
        for &x in &d {
            at_least[x as usize] += 1;
        }
        for k in (0..=n).rev() {
            at_least[k] += at_least[k + 1];
        }
        for k in 1..=n {
            let lhs = prefix[k];
            // entries at positions k+1.. with degree >= k contribute k each
            let split = at_least[k].max(k);
            let capped = (split - k) as u64 * k as u64;
            let rest = prefix[n] - prefix[split];
            let rhs = (k * (k - 1)) as u64 + capped + rest;
            if lhs > rhs {
                return Err(format!(
                    "Erdős–Gallai violated at k={k}: {lhs} > {rhs}"
                ));
            }
        }
        Ok(())
    }

    pub fn is_graphical(&self) -> bool {
        self.check_graphical().is_ok()
    }
}

impl From<Vec<u32>> for DegreeSequence {
    fn from(v: Vec<u32>) -> Self {
        DegreeSequence(v)
    }
}

/// Integer powerlaw over `[a, b)` with `P[X = k] ∝ k^-gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerlawSpec {
    pub a: u32,
    pub b: u32,
    pub gamma: f64,
}

impl PowerlawSpec {
    pub fn new(a: u32, b: u32, gamma: f64) -> Result<Self> {
        let spec = PowerlawSpec { a, b, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a < 1 || self.a >= self.b {
            return Err(Error::invalid(format!(
                "powerlaw support [{}, {}) needs 1 <= a < b",
                self.a, self.b
            )));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::invalid(format!("gamma {} < 1", self.gamma)));
        }
        Ok(())
    }

    /// Normalized probabilities for `a, a+1, ..., b-1`.
    pub fn weights(&self) -> Vec<f64> {
        let raw: Vec<f64> = (self.a..self.b)
            .map(|k| f64::from(k).powf(-self.gamma))
            .collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }

    pub fn mean(&self) -> f64 {
        (self.a..self.b)
            .zip(self.weights())
            .map(|(k, w)| f64::from(k) * w)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        (self.a..self.b)
            .zip(self.weights())
            .map(|(k, w)| (f64::from(k) - mean).powi(2) * w)
            .sum()
    }
}

/// Draws `n` i.i.d. degrees from `spec`. An odd total is repaired by moving
/// the last entry one step (up if it stays below `b`, down otherwise).
pub fn sample_powerlaw_degrees<R: Rng + ?Sized>(
    spec: &PowerlawSpec,
    n: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    spec.validate()?;
    let dist = WeightedIndex::new(spec.weights())
        .map_err(|e| Error::invalid(format!("powerlaw weights: {e}")))?;
    let mut degrees: Vec<u32> = (0..n).map(|_| spec.a + dist.sample(rng) as u32).collect();
    let odd = degrees.iter().map(|&d| u64::from(d)).sum::<u64>() % 2 == 1;
    if odd {
        let last = degrees.last_mut().expect("odd sum implies n >= 1");
        if *last + 1 < spec.b {
            *last += 1;
        } else {
            *last -= 1;
        }
    }
    Ok(DegreeSequence(degrees))
}

/// Realizes `degrees` by repeatedly connecting the node of highest residual
/// degree to the next highest ones.
pub fn havel_hakimi(degrees: &DegreeSequence) -> Result<Graph> {
    degrees.check_graphical().map_err(Error::NotGraphical)?;
    let n = degrees.len();

    // residual degree -> nodes
    let mut buckets: BTreeMap<u32, Vec<Node>> = BTreeMap::new();
    for (v, &d) in degrees.as_slice().iter().enumerate().rev() {
        if d > 0 {
            buckets.entry(d).or_default().push(v as Node);
        }
    }

    let mut edges = Vec::with_capacity((degrees.sum() / 2) as usize);
    let mut picked: Vec<(u32, Node)> = Vec::new();
    while let Some(mut top) = buckets.last_entry() {
        let d = *top.key();
        let hub = top.get_mut().pop().expect("buckets are never empty");
        if top.get().is_empty() {
            top.remove();
        }

        picked.clear();
        let mut need = d as usize;
        while need > 0 {
            let Some(mut entry) = buckets.last_entry() else {
                return Err(Error::NotGraphical(format!(
                    "node {hub} needs {need} more neighbors but none remain"
                )));
            };
            let residual = *entry.key();
            let nodes = entry.get_mut();
            while need > 0 {
                match nodes.pop() {
                    Some(v) => {
                        picked.push((residual, v));
                        need -= 1;
                    }
                    None => break,
                }
            }
            if nodes.is_empty() {
                entry.remove();
            }
        }
        for &(residual, v) in &picked {
            edges.push(Edge::new(hub, v));
            if residual > 1 {
                buckets.entry(residual - 1).or_default().push(v);
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn havel_hakimi_small_cases() {
        let g = havel_hakimi(&vec![1, 1].into()).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1)]);

        let g = havel_hakimi(&vec![2, 2, 2].into()).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 2)]);

        let err = havel_hakimi(&vec![3, 3, 1, 1].into()).unwrap_err();
        assert!(err.to_string().contains("k=2"), "{err}");
    }

    #[test]
    fn graphical_checks() {
        assert!(DegreeSequence::new(vec![]).is_graphical());
        assert!(DegreeSequence::new(vec![0, 0]).is_graphical());
        assert!(!DegreeSequence::new(vec![1]).is_graphical());
        assert!(DegreeSequence::new(vec![2, 1, 1, 0]).is_graphical());
        assert!(!DegreeSequence::new(vec![3, 1, 1]).is_graphical());
        assert!(DegreeSequence::new(vec![3, 3, 2, 2, 2]).is_graphical());
    }

    #[test]
    fn powerlaw_two_point_weights() {
        let spec = PowerlawSpec::new(1, 3, 2.0).unwrap();
        let w = spec.weights();
        assert!((w[0] - 0.8).abs() < 1e-12);
        assert!((w[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn powerlaw_singleton_support() {
        let spec = PowerlawSpec::new(5, 6, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_powerlaw_degrees(&spec, 10, &mut rng).unwrap();
        assert!(d.as_slice().iter().all(|&x| x == 5));
    }

    #[test]
    fn powerlaw_odd_sum_repair() {
        let spec = PowerlawSpec::new(5, 6, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_powerlaw_degrees(&spec, 3, &mut rng).unwrap();
        assert_eq!(d.as_slice(), &[5, 5, 4]);
        assert_eq!(d.sum() % 2, 0);
    }

    #[test]
    fn powerlaw_rejects_invalid() {
        assert!(PowerlawSpec::new(0, 3, 2.0).is_err());
        assert!(PowerlawSpec::new(3, 3, 2.0).is_err());
        assert!(PowerlawSpec::new(1, 3, 0.5).is_err());
    }
}
