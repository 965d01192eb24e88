use rustc_hash::FxHashMap;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Edge, Graph, Node};

/// Enumeration gives up beyond this many graphs.
pub const MAX_ENUMERATED: usize = 1_000_000;
const MAX_NODES: usize = 10;

/// All simple graphs with the given degrees, each once, in lexicographic
/// order of their sorted edge lists.
pub fn enumerate_state_space(degrees: &DegreeSequence) -> Result<Vec<Graph>> {
    let n = degrees.len();
    if n > MAX_NODES {
        return Err(Error::Infeasible(format!("{n} nodes, at most {MAX_NODES} supported")));
    }
    if !degrees.is_graphical() {
        return Ok(Vec::new());
    }
    let mut e = Enumerator {
        n,
        residual: degrees.as_slice().to_vec(),
        edges: Vec::new(),
        out: Vec::new(),
    };
    e.node(0)?;
    Ok(e.out)
}

struct Enumerator {
    n: usize,
    residual: Vec<u32>,
    edges: Vec<Edge>,
    out: Vec<Graph>,
}

impl Enumerator {
    fn node(&mut self, u: usize) -> Result<()> {
        let Some(u) = (u..self.n).find(|&u| self.residual[u] > 0) else {
            if self.out.len() == MAX_ENUMERATED {
                return Err(Error::Infeasible(format!("more than {MAX_ENUMERATED} graphs")));
            }
            self.out.push(Graph::from_sorted_unchecked(self.n, self.edges.clone()));
            return Ok(());
        };
        self.pick(u, u + 1)
    }

    /// Chooses the remaining neighbors of `u` among nodes `>= from`.
    fn pick(&mut self, u: usize, from: usize) -> Result<()> {
        if self.residual[u] == 0 {
            return self.node(u + 1);
        }
        for v in from..self.n {
            if self.residual[v] == 0 {
                continue;
            }
            self.residual[u] -= 1;
            self.residual[v] -= 1;
            self.edges.push(Edge::new(u as Node, v as Node));
            self.pick(u, v + 1)?;
            self.edges.pop();
            self.residual[u] += 1;
            self.residual[v] += 1;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformityReport {
    pub states: usize,
    pub samples: u64,
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub p_value: f64,
}

/// Chi-square goodness of fit of `sampler(i)` for `i < samples` against the
/// uniform distribution on all graphs with `degrees`.
pub fn uniformity_test(
    degrees: &DegreeSequence,
    mut sampler: impl FnMut(u64) -> Result<Graph>,
    samples: u64,
) -> Result<UniformityReport> {
    let states = enumerate_state_space(degrees)?;
    if states.is_empty() {
        return Err(Error::NotGraphical("no realization".into()));
    }
    let index: FxHashMap<&[Edge], usize> =
        states.iter().enumerate().map(|(i, g)| (g.edges(), i)).collect();
    let mut counts = vec![0u64; states.len()];
    for i in 0..samples {
        let g = sampler(i)?;
        let &s = index.get(g.edges()).ok_or_else(|| {
            Error::NotSimple("sampled graph has a different degree sequence".into())
        })?;
        counts[s] += 1;
    }
    let expected = samples as f64 / states.len() as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let p_value = if states.len() == 1 {
        1.0
    } else {
        let chi = ChiSquared::new((states.len() - 1) as f64).expect("positive degrees of freedom");
        chi.sf(statistic)
    };
    Ok(UniformityReport {
        states: states.len(),
        samples,
        counts,
        statistic,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(d: &[u32]) -> usize {
        enumerate_state_space(&d.to_vec().into()).unwrap().len()
    }

    #[test]
    fn small_state_spaces() {
        assert_eq!(count(&[2, 2, 2]), 1);
        assert_eq!(count(&[1, 1, 1, 1]), 3);
        assert_eq!(count(&[2, 2, 2, 2]), 3);
        assert_eq!(count(&[3, 1]), 0);
        assert_eq!(count(&[]), 1);
    }

    #[test]
    fn too_many_nodes() {
        assert!(matches!(
            enumerate_state_space(&vec![1; 12].into()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn constant_sampler_is_rejected() {
        let d: DegreeSequence = vec![1, 1, 1, 1].into();
        let g = Graph::from_pairs(4, [(0, 1), (2, 3)]).unwrap();
        let r = uniformity_test(&d, |_| Ok(g.clone()), 300).unwrap();
        assert!(r.p_value < 1e-10);
        assert_eq!(r.counts.iter().sum::<u64>(), 300);
    }

    #[test]
    fn round_robin_sampler_is_accepted() {
        let d: DegreeSequence = vec![1, 1, 1, 1].into();
        let all = enumerate_state_space(&d).unwrap();
        let r = uniformity_test(&d, |i| Ok(all[i as usize % 3].clone()), 300).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }
}
