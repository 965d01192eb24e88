use crate::error::{Error, Result};

/// Message address: the position with value `value` in round `round`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Target {
    pub round: usize,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageClass {
    /// (i) same microchunk
    Microchunk,
    /// (ii) other microchunk of the same batch
    Batch,
    /// (iii) later batch of the loaded macrochunk
    Macrochunk,
    /// (iii) later macrochunk or next round, via a queue
    Queued,
}

/// Where an endpoint expects an edge produced by the trade of `round` whose
/// last position has value `last`: at its own position later in the same
/// round if it is still to be traded, else at its position in the next
/// round. `now` and `next` are the endpoint's values in both rounds.
#[inline]
pub fn next_target(round: usize, last: u64, now: u64, next: u64, active: bool) -> Target {
    if !active && now > last {
        Target { round, value: now }
    } else {
        Target {
            round: round + 1,
            value: next,
        }
    }
}

/// First value of every macrochunk of one round, from a scan of the
/// round's sorted auxiliary records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Delimiters {
    starts: Vec<u64>,
}

impl Delimiters {
    pub fn new(starts: Vec<u64>) -> Self {
        debug_assert!(starts.windows(2).all(|w| w[0] < w[1]));
        Delimiters { starts }
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    /// Macrochunk holding `value`, by binary search.
    #[inline]
    pub fn chunk_of(&self, value: u64) -> usize {
        self.starts.partition_point(|&d| d <= value).saturating_sub(1)
    }
}

/// Queue index in `[0, 2k)` for a message sent from the position with
/// value `sender` in `round`. The two queue sets alternate between even and
/// odd rounds.
pub fn route_message(
    k: usize,
    current: &Delimiters,
    next: &Delimiters,
    round: usize,
    sender: u64,
    target: Target,
) -> Result<usize> {
    if target.round == round {
        if target.value <= sender {
            return Err(Error::BackwardMessage {
                target: target.value,
                current: sender,
            });
        }
        Ok((round % 2) * k + current.chunk_of(target.value))
    } else if target.round == round + 1 {
        Ok(((round + 1) % 2) * k + next.chunk_of(target.value))
    } else {
        Err(Error::invalid(format!(
            "message from round {round} to round {}",
            target.round
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgcb::{PermutationMap, RoundMap};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn both_endpoints_done_go_to_next_round() {
        // two rounds over six nodes
        let r1 = PermutationMap::new(vec![2, 0, 1, 4, 3, 5]).unwrap();
        let r2 = PermutationMap::new(vec![5, 2, 4, 0, 1, 3]).unwrap();
        // trade at positions 2, 3 (slot 1) exchanges nodes 1 and 4; it
        // produces edge {0, 1}
        let last = r1.value(4);
        let t0 = next_target(0, last, r1.value(0), r2.value(0), false);
        let t1 = next_target(0, last, r1.value(1), r2.value(1), true);
        assert_eq!(t0, Target { round: 1, value: 3 });
        assert_eq!(t1, Target { round: 1, value: 4 });
        // the message goes to node 0, the earlier of the two
        assert!(t0 < t1);
        let d = Delimiters::new(vec![0, 2, 4]);
        let q = route_message(3, &d, &d, 0, last, t0).unwrap();
        assert_eq!(q, 3 + 1);
    }

    #[test]
    fn later_passive_stays_in_round() {
        let t = next_target(2, 10, 15, 3, false);
        assert_eq!(t, Target { round: 2, value: 15 });
        let d = Delimiters::new(vec![0, 12]);
        assert_eq!(route_message(2, &d, &d, 2, 10, t).unwrap(), 1);
        assert!(matches!(
            route_message(2, &d, &d, 2, 16, t),
            Err(Error::BackwardMessage { .. })
        ));
        assert!(route_message(2, &d, &d, 0, 16, t).is_err());
    }

    #[test]
    fn random_routes_respect_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut values: Vec<u64> = (0..5000).map(|_| rng.random_range(0..1_000_000)).collect();
        values.sort_unstable();
        values.dedup();
        let k = 16;
        let per = values.len().div_ceil(k);
        let starts: Vec<u64> = values.iter().step_by(per).copied().collect();
        let d = Delimiters::new(starts.clone());
        for _ in 0..100_000 {
            let y = values[rng.random_range(0..values.len())];
            let c = d.chunk_of(y);
            assert!(starts[c] <= y);
            assert!(c + 1 == starts.len() || y < starts[c + 1]);
        }
    }
}
