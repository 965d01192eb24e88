use super::{TradePair, TradeSequence};
use crate::error::{Error, Result};
use crate::graph::Node;
use crate::lcg::LcgMap;

/// A global trade: consecutive positions of an ordering of the nodes are
/// paired. With an odd node count the last position is left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalTradeDescriptor {
    /// `perm[i]` is the node at position `i`.
    Permutation(Vec<Node>),
    /// Nodes ordered by their image under the map.
    Lcg(LcgMap),
}

impl GlobalTradeDescriptor {
    pub fn permutation(perm: Vec<Node>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &v in &perm {
            match seen.get_mut(v as usize) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(Error::invalid(format!("node {v} repeated in permutation"))),
                None => {
                    return Err(Error::NodeOutOfRange {
                        node: v.into(),
                        n: perm.len(),
                    })
                }
            }
        }
        Ok(GlobalTradeDescriptor::Permutation(perm))
    }

    pub fn n(&self) -> usize {
        match self {
            GlobalTradeDescriptor::Permutation(p) => p.len(),
            GlobalTradeDescriptor::Lcg(map) => map.domain() as usize,
        }
    }

    /// Nodes in pairing order.
    pub fn order(&self) -> Vec<Node> {
        match self {
            GlobalTradeDescriptor::Permutation(p) => p.clone(),
            GlobalTradeDescriptor::Lcg(map) => {
                map.nodes_by_rank().into_iter().map(|x| x as Node).collect()
            }
        }
    }
}

pub fn expand_global_trade(g: &GlobalTradeDescriptor) -> TradeSequence {
    let order = g.order();
    let pairs: Vec<TradePair> = order
        .chunks_exact(2)
        .map(|c| TradePair { i: c[0], j: c[1] })
        .collect();
    let len = pairs.len();
    TradeSequence::with_round_len(pairs, len)
}

/// Concatenates the expansions of several global trades on `n` nodes, one
/// oracle round per descriptor.
pub fn expand_rounds(descs: &[GlobalTradeDescriptor], n: usize) -> Result<TradeSequence> {
    let mut pairs = Vec::with_capacity(descs.len() * (n / 2));
    for d in descs {
        if d.n() != n {
            return Err(Error::invalid(format!(
                "global trade over {} nodes, expected {n}",
                d.n()
            )));
        }
        pairs.extend_from_slice(expand_global_trade(d).pairs());
    }
    Ok(TradeSequence::with_round_len(pairs, n / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &TradeSequence) -> Vec<(Node, Node)> {
        s.pairs().iter().map(|t| (t.i, t.j)).collect()
    }

    #[test]
    fn identity_even_and_odd() {
        let g = GlobalTradeDescriptor::permutation((0..4).collect()).unwrap();
        assert_eq!(pairs(&expand_global_trade(&g)), vec![(0, 1), (2, 3)]);
        let g = GlobalTradeDescriptor::permutation((0..5).collect()).unwrap();
        assert_eq!(pairs(&expand_global_trade(&g)), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn lcg_descriptor() {
        let map = LcgMap::new(4, 1, 6).unwrap();
        let s = expand_global_trade(&GlobalTradeDescriptor::Lcg(map));
        assert_eq!(pairs(&s), vec![(5, 0), (2, 4), (1, 3)]);
        assert_eq!(s.round_len(), Some(3));
    }

    #[test]
    fn bad_permutations() {
        assert!(GlobalTradeDescriptor::permutation(vec![0, 0, 1]).is_err());
        assert!(GlobalTradeDescriptor::permutation(vec![0, 3]).is_err());
    }

    #[test]
    fn rounds_share_length() {
        let a = GlobalTradeDescriptor::permutation(vec![3, 1, 0, 2]).unwrap();
        let b = GlobalTradeDescriptor::Lcg(LcgMap::identity(4).unwrap());
        let s = expand_rounds(&[a, b], 4).unwrap();
        assert_eq!(pairs(&s), vec![(3, 1), (0, 2), (0, 1), (2, 3)]);
        assert_eq!(s.key(2), (1, 0));
    }
}
