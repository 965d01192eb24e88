//! Sorted runs on scratch files, read and written one block at a time.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fs::File;
use std::io::{Read, Seek, SeekFrom, Write};
use std::marker::PhantomData;
use std::sync::Arc;

use super::{FileStore, Record};
use crate::error::Result;

#[derive(Debug)]
pub(crate) struct Run<T> {
    file: File,
    pub(crate) len: u64,
    _t: PhantomData<T>,
}

/// Writes items block by block into a fresh scratch file.
pub(crate) struct RunWriter<T> {
    store: Arc<FileStore>,
    file: File,
    buf: Vec<u8>,
    pending: usize,
    len: u64,
    _t: PhantomData<T>,
}

impl<T: Record> RunWriter<T> {
    pub(crate) fn new(store: &Arc<FileStore>) -> Result<Self> {
        let block = store.meter.block;
        Ok(RunWriter {
            file: store.spill_file()?,
            store: Arc::clone(store),
            buf: vec![0u8; block * T::SIZE],
            pending: 0,
            len: 0,
            _t: PhantomData,
        })
    }

    pub(crate) fn push(&mut self, item: T) -> Result<()> {
        let at = self.pending * T::SIZE;
        item.encode(&mut self.buf[at..at + T::SIZE]);
        self.pending += 1;
        self.len += 1;
        if self.pending == self.store.meter.block {
            self.flush_block()?;
        }
        Ok(())
    }

    fn flush_block(&mut self) -> Result<()> {
        if self.pending == 0 {
            return Ok(());
        }
        self.file
            .write_all(&self.buf[..self.pending * T::SIZE])
            .map_err(|e| self.store.err(e))?;
        self.store.meter.add_write();
        self.pending = 0;
        Ok(())
    }

    pub(crate) fn finish(mut self) -> Result<Run<T>> {
        self.flush_block()?;
        Ok(Run {
            file: self.file,
            len: self.len,
            _t: PhantomData,
        })
    }
}

pub(crate) fn write_run<T: Record>(
    store: &Arc<FileStore>,
    items: impl IntoIterator<Item = T>,
) -> Result<Run<T>> {
    let mut w = RunWriter::new(store)?;
    for x in items {
        w.push(x)?;
    }
    w.finish()
}

/// Streams a run from its start, one block per read.
pub(crate) struct RunReader<T> {
    store: Arc<FileStore>,
    file: File,
    remaining: u64,
    bytes: Vec<u8>,
    items: VecDeque<T>,
}

impl<T: Record> RunReader<T> {
    pub(crate) fn open(store: &Arc<FileStore>, run: &Run<T>) -> Result<Self> {
        let mut file = run.file.try_clone().map_err(|e| store.err(e))?;
        file.seek(SeekFrom::Start(0)).map_err(|e| store.err(e))?;
        Ok(RunReader {
            store: Arc::clone(store),
            file,
            remaining: run.len,
            bytes: vec![0u8; store.meter.block * T::SIZE],
            items: VecDeque::new(),
        })
    }

    fn refill(&mut self) -> Result<()> {
        let take = (self.remaining as usize).min(self.store.meter.block);
        if take == 0 {
            return Ok(());
        }
        let bytes = &mut self.bytes[..take * T::SIZE];
        self.file.read_exact(bytes).map_err(|e| self.store.err(e))?;
        self.store.meter.add_read();
        self.items
            .extend(bytes.chunks_exact(T::SIZE).map(T::decode));
        self.remaining -= take as u64;
        Ok(())
    }

    pub(crate) fn next(&mut self) -> Result<Option<T>> {
        if self.items.is_empty() {
            self.refill()?;
        }
        Ok(self.items.pop_front())
    }
}

/// k-way merge over sorted runs.
pub(crate) struct Merger<T> {
    readers: Vec<RunReader<T>>,
    heads: BinaryHeap<Reverse<(T, usize)>>,
}

impl<T: Record> Merger<T> {
    pub(crate) fn new() -> Self {
        Merger {
            readers: Vec::new(),
            heads: BinaryHeap::new(),
        }
    }

    pub(crate) fn add(&mut self, mut reader: RunReader<T>) -> Result<()> {
        let idx = self.readers.len();
        if let Some(x) = reader.next()? {
            self.heads.push(Reverse((x, idx)));
        }
        self.readers.push(reader);
        Ok(())
    }

    pub(crate) fn peek(&self) -> Option<&T> {
        self.heads.peek().map(|Reverse((x, _))| x)
    }

    pub(crate) fn pop(&mut self) -> Result<Option<T>> {
        let Some(Reverse((x, idx))) = self.heads.pop() else {
            return Ok(None);
        };
        if let Some(next) = self.readers[idx].next()? {
            self.heads.push(Reverse((next, idx)));
        }
        Ok(Some(x))
    }

    #[cfg(test)]
    pub(crate) fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }
}

/// Merges `runs` into one.
pub(crate) fn merge_runs<T: Record>(store: &Arc<FileStore>, runs: &[Run<T>]) -> Result<Run<T>> {
    let mut merger = Merger::new();
    for r in runs {
        merger.add(RunReader::open(store, r)?)?;
    }
    let mut w = RunWriter::new(store)?;
    while let Some(x) = merger.pop()? {
        w.push(x)?;
    }
    w.finish()
}

/// Merges groups of `fan_in` runs until at most `fan_in` remain.
pub(crate) fn reduce_runs<T: Record>(
    store: &Arc<FileStore>,
    mut runs: Vec<Run<T>>,
    fan_in: usize,
) -> Result<Vec<Run<T>>> {
    let fan_in = fan_in.max(2);
    while runs.len() > fan_in {
        let mut next = Vec::with_capacity(runs.len().div_ceil(fan_in));
        for group in runs.chunks(fan_in) {
            next.push(merge_runs(store, group)?);
        }
        runs = next;
    }
    Ok(runs)
}
