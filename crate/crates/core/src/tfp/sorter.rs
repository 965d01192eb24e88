use std::sync::Arc;

use super::run::{reduce_runs, write_run, Merger, Run, RunReader};
use super::{FileStore, Record, Storage};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Write,
    Read,
}

/// Two-phase container: push items, [`switch`](Sorter::switch), then stream
/// them back in ascending order. The read phase can be rewound.
///
/// With file storage at most `M` items are buffered; full buffers become
/// sorted runs which are merged `M/B` at a time.
pub struct Sorter<T: Record> {
    storage: Storage,
    phase: Phase,
    buf: Vec<T>,
    cursor: usize,
    runs: Vec<Run<T>>,
    merger: Option<Merger<T>>,
    len: u64,
}

impl<T: Record> Sorter<T> {
    pub fn new(storage: Storage) -> Self {
        Sorter {
            storage,
            phase: Phase::Write,
            buf: Vec::new(),
            cursor: 0,
            runs: Vec::new(),
            merger: None,
            len: 0,
        }
    }

    pub fn in_memory() -> Self {
        Self::new(Storage::Memory)
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_reading(&self) -> bool {
        self.phase == Phase::Read
    }

    fn file(&self) -> Option<&Arc<FileStore>> {
        match &self.storage {
            Storage::File(f) => Some(f),
            Storage::Memory => None,
        }
    }

    pub fn push(&mut self, item: T) -> Result<()> {
        if self.phase != Phase::Write {
            return Err(Error::Phase("push while reading"));
        }
        self.buf.push(item);
        self.len += 1;
        if let Some(store) = self.file() {
            if self.buf.len() >= store.meter.memory {
                self.spill()?;
            }
        }
        Ok(())
    }

    fn spill(&mut self) -> Result<()> {
        let store = Arc::clone(self.file().expect("spill needs file storage"));
        self.buf.sort_unstable();
        let run = write_run(&store, self.buf.drain(..))?;
        self.runs.push(run);
        Ok(())
    }

    /// Ends the write phase.
    pub fn switch(&mut self) -> Result<()> {
        if self.phase != Phase::Write {
            return Err(Error::Phase("switch while reading"));
        }
        if !self.runs.is_empty() {
            if !self.buf.is_empty() {
                self.spill()?;
            }
            let store = Arc::clone(self.file().unwrap());
            let runs = std::mem::take(&mut self.runs);
            self.runs = reduce_runs(&store, runs, store.meter.fan_in())?;
        } else {
            self.buf.sort_unstable();
        }
        self.phase = Phase::Read;
        self.rewind()
    }

    /// Restarts the stream from the smallest item.
    pub fn rewind(&mut self) -> Result<()> {
        if self.phase != Phase::Read {
            return Err(Error::Phase("rewind while writing"));
        }
        self.cursor = 0;
        self.merger = None;
        if let Some(store) = self.file().cloned() {
            if !self.runs.is_empty() {
                let mut merger = Merger::new();
                for r in &self.runs {
                    merger.add(RunReader::open(&store, r)?)?;
                }
                self.merger = Some(merger);
            }
        }
        Ok(())
    }

    pub fn peek(&self) -> Option<&T> {
        match &self.merger {
            Some(m) => m.peek(),
            None => self.buf.get(self.cursor),
        }
    }

    pub fn pop(&mut self) -> Result<Option<T>> {
        if self.phase != Phase::Read {
            return Err(Error::Phase("read while writing"));
        }
        match &mut self.merger {
            Some(m) => m.pop(),
            None => {
                let x = self.buf.get(self.cursor).copied();
                self.cursor += usize::from(x.is_some());
                Ok(x)
            }
        }
    }

    /// Drops all items and returns to the write phase.
    pub fn clear(&mut self) {
        self.phase = Phase::Write;
        self.buf.clear();
        self.cursor = 0;
        self.runs.clear();
        self.merger = None;
        self.len = 0;
    }

    /// Streams the remaining items into a vector.
    pub fn drain_to_vec(&mut self) -> Result<Vec<T>> {
        let mut out = Vec::new();
        while let Some(x) = self.pop()? {
            out.push(x);
        }
        Ok(out)
    }
}
