use curveball::tfp::{Message, MsgPq, Record, Sorter, SpillQueue, Storage};
use proptest::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Tagged {
    key: u64,
    tag: u64,
}

impl Record for Tagged {
    const SIZE: usize = 16;
    fn encode(&self, out: &mut [u8]) {
        (self.key, self.tag).encode(out)
    }
    fn decode(buf: &[u8]) -> Self {
        let (key, tag) = <(u64, u64)>::decode(buf);
        Tagged { key, tag }
    }
}

impl Message for Tagged {
    fn key(&self) -> u64 {
        self.key
    }
}

fn storage(file: bool) -> Storage {
    if file {
        Storage::temp(8, 2).unwrap()
    } else {
        Storage::Memory
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sorter_sorts(items in prop::collection::vec(any::<u64>(), 0..300), file: bool) {
        let mut s = Sorter::new(storage(file));
        for &x in &items {
            s.push(x).unwrap();
        }
        s.switch().unwrap();
        let mut want = items.clone();
        want.sort_unstable();
        prop_assert_eq!(s.drain_to_vec().unwrap(), want.clone());
        s.rewind().unwrap();
        prop_assert_eq!(s.drain_to_vec().unwrap(), want);
    }

    /// Equal keys come out in insertion order.
    #[test]
    fn pq_pops_stably(keys in prop::collection::vec(0u64..20, 0..300), file: bool) {
        let mut pq = MsgPq::new(storage(file));
        for (tag, &key) in keys.iter().enumerate() {
            pq.push(Tagged { key, tag: tag as u64 }).unwrap();
        }
        let mut want: Vec<Tagged> = keys
            .iter()
            .enumerate()
            .map(|(tag, &key)| Tagged { key, tag: tag as u64 })
            .collect();
        want.sort_by_key(|t| t.key);
        let mut got = Vec::new();
        while let Some(t) = pq.try_pop().unwrap() {
            got.push(t);
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn queue_is_fifo(items in prop::collection::vec(any::<u64>(), 0..300), file: bool) {
        let mut q = SpillQueue::new(storage(file));
        q.extend(items.iter().copied()).unwrap();
        prop_assert_eq!(q.len(), items.len() as u64);
        prop_assert_eq!(q.drain_all().unwrap(), items);
    }
}
