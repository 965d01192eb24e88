use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::sync::Arc;

use super::{FileStore, Record, Storage};
use crate::error::Result;

/// Append-only FIFO that is drained as a whole, e.g. the messages destined
/// to one macrochunk. File storage writes full blocks of `B` items.
pub struct SpillQueue<T: Record> {
    storage: Storage,
    buf: Vec<T>,
    file: Option<File>,
    spilled: u64,
}

impl<T: Record> SpillQueue<T> {
    pub fn new(storage: Storage) -> Self {
        SpillQueue {
            storage,
            buf: Vec::new(),
            file: None,
            spilled: 0,
        }
    }

    pub fn len(&self) -> u64 {
        self.spilled + self.buf.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn store(&self) -> Option<Arc<FileStore>> {
        match &self.storage {
            Storage::File(f) => Some(Arc::clone(f)),
            Storage::Memory => None,
        }
    }

    pub fn push(&mut self, item: T) -> Result<()> {
        self.buf.push(item);
        if let Some(store) = self.store() {
            if self.buf.len() >= store.meter.block {
                self.flush(&store)?;
            }
        }
        Ok(())
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = T>) -> Result<()> {
        for x in items {
            self.push(x)?;
        }
        Ok(())
    }

    fn flush(&mut self, store: &Arc<FileStore>) -> Result<()> {
        if self.file.is_none() {
            self.file = Some(store.spill_file()?);
        }
        let mut bytes = vec![0u8; self.buf.len() * T::SIZE];
        for (x, chunk) in self.buf.iter().zip(bytes.chunks_exact_mut(T::SIZE)) {
            x.encode(chunk);
        }
        let file = self.file.as_mut().unwrap();
        file.write_all(&bytes).map_err(|e| store.err(e))?;
        for _ in 0..self.buf.len().div_ceil(store.meter.block) {
            store.meter.add_write();
        }
        self.spilled += self.buf.len() as u64;
        self.buf.clear();
        Ok(())
    }

    /// Removes and returns every item in insertion order.
    pub fn drain_all(&mut self) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.len() as usize);
        if let (Some(store), Some(file)) = (self.store(), self.file.as_mut()) {
            if self.spilled > 0 {
                file.seek(SeekFrom::Start(0)).map_err(|e| store.err(e))?;
                let block = store.meter.block;
                let mut bytes = vec![0u8; block * T::SIZE];
                let mut left = self.spilled as usize;
                while left > 0 {
                    let take = left.min(block);
                    let chunk = &mut bytes[..take * T::SIZE];
                    file.read_exact(chunk).map_err(|e| store.err(e))?;
                    store.meter.add_read();
                    out.extend(chunk.chunks_exact(T::SIZE).map(T::decode));
                    left -= take;
                }
                file.set_len(0).map_err(|e| store.err(e))?;
                file.seek(SeekFrom::Start(0)).map_err(|e| store.err(e))?;
            }
        }
        self.spilled = 0;
        out.append(&mut self.buf);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifo_both_backends() {
        for storage in [Storage::Memory, Storage::temp(8, 4).unwrap()] {
            let mut q = SpillQueue::<u64>::new(storage.clone());
            q.extend(0..11).unwrap();
            assert_eq!(q.len(), 11);
            assert_eq!(q.drain_all().unwrap(), (0..11).collect::<Vec<_>>());
            assert!(q.is_empty());
            q.extend([5, 4]).unwrap();
            assert_eq!(q.drain_all().unwrap(), vec![5, 4]);
            if let Some(m) = storage.meter() {
                assert_eq!(m.writes(), 2);
                assert_eq!(m.reads(), 2);
            }
        }
    }
}
