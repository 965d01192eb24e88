use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::Arc;

use super::run::{merge_runs, write_run, Merger, Run, RunReader, RunWriter};
use super::{get_u64, put_u64, FileStore, Message, Record, Storage};
use crate::error::{Error, Result};

/// Message tagged with its insertion number; equal keys pop in insertion
/// order.
#[derive(Clone, Copy, Debug)]
struct Entry<T> {
    key: u64,
    seq: u64,
    msg: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        (self.key, self.seq) == (other.key, other.seq)
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.key, self.seq).cmp(&(other.key, other.seq))
    }
}

impl<T: Message> Record for Entry<T> {
    const SIZE: usize = 16 + T::SIZE;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.key);
        put_u64(out, 8, self.seq);
        self.msg.encode(&mut out[16..]);
    }
    fn decode(buf: &[u8]) -> Self {
        Entry {
            key: get_u64(buf, 0),
            seq: get_u64(buf, 8),
            msg: T::decode(&buf[16..]),
        }
    }
}

/// Min-priority queue of keyed messages.
///
/// With file storage the in-memory heap holds at most `M` entries; when it
/// fills up it is written out as a sorted run. Pops take the minimum over
/// the heap and the run heads. Runs are merged into one when there are
/// more than `M/B - 1` of them.
pub struct MsgPq<T: Message> {
    storage: Storage,
    heap: BinaryHeap<Reverse<Entry<T>>>,
    runs: Vec<Run<Entry<T>>>,
    merger: Merger<Entry<T>>,
    seq: u64,
    len: usize,
}

impl<T: Message> MsgPq<T> {
    pub fn new(storage: Storage) -> Self {
        MsgPq {
            storage,
            heap: BinaryHeap::new(),
            runs: Vec::new(),
            merger: Merger::new(),
            seq: 0,
            len: 0,
        }
    }

    pub fn in_memory() -> Self {
        Self::new(Storage::Memory)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn file(&self) -> Option<Arc<FileStore>> {
        match &self.storage {
            Storage::File(f) => Some(Arc::clone(f)),
            Storage::Memory => None,
        }
    }

    pub fn push(&mut self, msg: T) -> Result<()> {
        let e = Entry {
            key: msg.key(),
            seq: self.seq,
            msg,
        };
        self.seq += 1;
        self.len += 1;
        self.heap.push(Reverse(e));
        if let Some(store) = self.file() {
            if self.heap.len() >= store.meter.memory {
                self.spill(&store)?;
            }
        }
        Ok(())
    }

    fn spill(&mut self, store: &Arc<FileStore>) -> Result<()> {
        let mut items: Vec<Entry<T>> = self.heap.drain().map(|Reverse(e)| e).collect();
        items.sort_unstable();
        let run = write_run(store, items)?;
        self.runs.push(run);
        if self.runs.len() >= store.meter.fan_in().max(2) {
            // the merger's readers hold unread items of the old runs, so
            // rebuild from what is still pending
            let mut w = RunWriter::new(store)?;
            while let Some(x) = self.merger.pop()? {
                w.push(x)?;
            }
            let pending = w.finish()?;
            let last = self.runs.pop().unwrap();
            self.runs.clear();
            self.runs = vec![merge_runs(store, &[pending, last])?];
            self.merger = Merger::new();
            self.merger.add(RunReader::open(store, &self.runs[0])?)?;
        } else {
            let run = self.runs.last().unwrap();
            self.merger.add(RunReader::open(store, run)?)?;
        }
        Ok(())
    }

    pub fn peek(&self) -> Option<&T> {
        self.peek_entry().map(|e| &e.msg)
    }

    pub fn peek_key(&self) -> Option<u64> {
        self.peek_entry().map(|e| e.key)
    }

    fn peek_entry(&self) -> Option<&Entry<T>> {
        match (self.heap.peek(), self.merger.peek()) {
            (Some(Reverse(a)), Some(b)) => Some(if a < b { a } else { b }),
            (Some(Reverse(a)), None) => Some(a),
            (None, b) => b,
        }
    }

    pub fn try_pop(&mut self) -> Result<Option<T>> {
        let from_heap = match (self.heap.peek(), self.merger.peek()) {
            (None, None) => return Ok(None),
            (Some(Reverse(a)), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, Some(_)) => false,
        };
        self.len -= 1;
        let e = if from_heap {
            self.heap.pop().unwrap().0
        } else {
            self.merger.pop()?.unwrap()
        };
        Ok(Some(e.msg))
    }

    pub fn pop_min(&mut self) -> Result<T> {
        self.try_pop()?.ok_or(Error::EmptyQueue)
    }

    /// Pops the minimum if its key equals `key`.
    pub fn pop_if_key(&mut self, key: u64) -> Result<Option<T>> {
        if self.peek_key() == Some(key) {
            self.try_pop()
        } else {
            Ok(None)
        }
    }

    /// Debug helper: true when all spilled runs are exhausted.
    #[cfg(test)]
    pub(crate) fn runs_drained(&self) -> bool {
        self.merger.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pops_by_key_then_insertion() {
        let mut q = MsgPq::<(u64, u64)>::in_memory();
        q.push((2, 10)).unwrap();
        q.push((1, 11)).unwrap();
        q.push((2, 3)).unwrap();
        assert_eq!(q.pop_min().unwrap(), (1, 11));
        assert_eq!(q.pop_min().unwrap(), (2, 10));
        assert_eq!(q.pop_min().unwrap(), (2, 3));
        assert!(matches!(q.pop_min(), Err(Error::EmptyQueue)));
    }

    fn interleaved(storage: Storage) {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut q = MsgPq::<(u64, u64)>::new(storage);
        let mut reference: BinaryHeap<Reverse<(u64, u64)>> = BinaryHeap::new();
        let mut seq = 0;
        let mut floor = 0;
        for _ in 0..10_000 {
            if rng.random_bool(0.55) || reference.is_empty() {
                // payload = insertion number, so (key, payload) order is
                // exactly (key, insertion) order
                let key = floor + rng.random_range(0..200);
                q.push((key, seq)).unwrap();
                reference.push(Reverse((key, seq)));
                seq += 1;
            } else {
                let Reverse(want) = reference.pop().unwrap();
                assert_eq!(q.pop_min().unwrap(), want);
                floor = want.0;
            }
            assert_eq!(q.len(), reference.len());
        }
        while let Some(Reverse(want)) = reference.pop() {
            assert_eq!(q.pop_min().unwrap(), want);
        }
        assert!(q.is_empty());
    }

    #[test]
    fn matches_reference_heap_in_memory() {
        interleaved(Storage::Memory);
    }

    #[test]
    fn matches_reference_heap_file_backed() {
        let s = Storage::temp(64, 8).unwrap();
        interleaved(s.clone());
        assert!(s.meter().unwrap().writes() > 0);
    }

    #[test]
    fn file_backed_tolerates_keys_below_runs() {
        let s = Storage::temp(4, 2).unwrap();
        let mut q = MsgPq::<u64>::new(s);
        for k in [50, 40, 30, 20, 10, 60, 5, 70, 1] {
            q.push(k).unwrap();
        }
        let mut out = Vec::new();
        while let Some(x) = q.try_pop().unwrap() {
            out.push(x);
        }
        assert_eq!(out, vec![1, 5, 10, 20, 30, 40, 50, 60, 70]);
        assert!(q.runs_drained());
    }

    #[test]
    fn fibonacci_by_time_forward_processing() {
        // x_0 = 0, x_1 = 1; every x_i sends itself to i+1 and i+2, the
        // seed messages stand in for the first two
        let mut q = MsgPq::<(u64, u64)>::in_memory();
        q.push((2, 0)).unwrap();
        q.push((2, 1)).unwrap();
        q.push((3, 1)).unwrap();
        let mut xs = Vec::new();
        for i in 2..=7u64 {
            let mut x = 0;
            while let Some((_, v)) = q.pop_if_key(i).unwrap() {
                x += v;
            }
            xs.push(x);
            q.push((i + 1, x)).unwrap();
            q.push((i + 2, x)).unwrap();
        }
        assert_eq!(xs, vec![1, 2, 3, 5, 8, 13]);
    }
}
