use super::TradeSequence;
use crate::error::Result;
use crate::graph::Node;

/// Sentinel for "no further trade".
pub const INFINITY: u64 = u64::MAX;

/// For every node, the increasing list of trade indices it takes part in,
/// stored contiguously (CSR) with an implicit trailing [`INFINITY`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessorTable {
    begin: Vec<usize>,
    indices: Vec<u64>,
}

impl SuccessorTable {
    pub fn n(&self) -> usize {
        self.begin.len() - 1
    }

    /// Trade indices of `v`, without the sentinel.
    pub fn of(&self, v: Node) -> &[u64] {
        &self.indices[self.begin[v as usize]..self.begin[v as usize + 1]]
    }

    /// Trade indices of `v` followed by the sentinel.
    pub fn with_sentinel(&self, v: Node) -> impl Iterator<Item = u64> + '_ {
        self.of(v).iter().copied().chain(std::iter::once(INFINITY))
    }

    /// First trade of `v` strictly after `after` (or the first at all when
    /// `after` is `None`).
    pub fn next_after(&self, v: Node, after: Option<u64>) -> u64 {
        let list = self.of(v);
        let at = match after {
            None => 0,
            Some(t) => list.partition_point(|&x| x <= t),
        };
        list.get(at).copied().unwrap_or(INFINITY)
    }

    /// Stored entries including one sentinel per node.
    pub fn stored_len(&self) -> usize {
        self.indices.len() + self.n()
    }

    pub(crate) fn into_parts(self) -> (Vec<usize>, Vec<u64>) {
        (self.begin, self.indices)
    }
}

/// Counting sort of the trade indices by node.
pub fn compute_successors(seq: &TradeSequence, n: usize) -> Result<SuccessorTable> {
    seq.check_range(n)?;
    let mut begin = vec![0usize; n + 1];
    for t in seq.pairs() {
        begin[t.i as usize + 1] += 1;
        begin[t.j as usize + 1] += 1;
    }
    for v in 0..n {
        begin[v + 1] += begin[v];
    }
    let mut cursor = begin.clone();
    let mut indices = vec![0u64; 2 * seq.len()];
    for (k, t) in seq.pairs().iter().enumerate() {
        for v in [t.i, t.j] {
            indices[cursor[v as usize]] = k as u64;
            cursor[v as usize] += 1;
        }
    }
    Ok(SuccessorTable { begin, indices })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_node_example() {
        let seq = TradeSequence::from_pairs([(0, 1), (2, 3), (0, 2), (1, 3), (0, 3)]).unwrap();
        let s = compute_successors(&seq, 4).unwrap();
        let full = |v| s.with_sentinel(v).collect::<Vec<_>>();
        assert_eq!(full(0), vec![0, 2, 4, INFINITY]);
        assert_eq!(full(1), vec![0, 3, INFINITY]);
        assert_eq!(full(2), vec![1, 2, INFINITY]);
        assert_eq!(full(3), vec![1, 3, 4, INFINITY]);
        assert_eq!(s.stored_len(), 2 * 5 + 4);
        assert_eq!(s.next_after(0, Some(2)), 4);
        assert_eq!(s.next_after(1, Some(3)), INFINITY);
        assert_eq!(s.next_after(2, None), 1);
    }

    #[test]
    fn empty_sequence() {
        let s = compute_successors(&TradeSequence::default(), 3).unwrap();
        for v in 0..3 {
            assert_eq!(s.with_sentinel(v).collect::<Vec<_>>(), vec![INFINITY]);
        }
    }

    #[test]
    fn out_of_range() {
        let seq = TradeSequence::from_pairs([(0, 5)]).unwrap();
        assert!(compute_successors(&seq, 5).is_err());
    }
}
