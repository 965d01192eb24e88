//! Time-forward-processing building blocks: two-phase sorters, a keyed
//! min-priority message queue and FIFO spill queues, each either held in
//! memory or spilled to scratch files under a simulated `(M, B)` cost model.
//!
//! Spilled records are fixed-width little-endian; see [`Record`].

mod pq;
mod queue;
mod run;
mod sorter;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use pq::MsgPq;
pub use queue::SpillQueue;
pub use sorter::Sorter;

use crate::error::{Error, Result};

/// A fixed-width record that can be spilled to disk.
pub trait Record: Copy + Ord + Send + 'static {
    const SIZE: usize;
    fn encode(&self, out: &mut [u8]);
    fn decode(buf: &[u8]) -> Self;
}

/// A record with a processing-order key.
pub trait Message: Record {
    fn key(&self) -> u64;
}

pub fn put_u64(out: &mut [u8], at: usize, x: u64) {
    out[at..at + 8].copy_from_slice(&x.to_le_bytes());
}

pub fn get_u64(buf: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(buf[at..at + 8].try_into().unwrap())
}

pub fn put_u32(out: &mut [u8], at: usize, x: u32) {
    out[at..at + 4].copy_from_slice(&x.to_le_bytes());
}

pub fn get_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().unwrap())
}

impl Record for u64 {
    const SIZE: usize = 8;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, *self);
    }
    fn decode(buf: &[u8]) -> Self {
        get_u64(buf, 0)
    }
}

impl Message for u64 {
    fn key(&self) -> u64 {
        *self
    }
}

/// `(key, payload)`
impl Record for (u64, u64) {
    const SIZE: usize = 16;
    fn encode(&self, out: &mut [u8]) {
        put_u64(out, 0, self.0);
        put_u64(out, 8, self.1);
    }
    fn decode(buf: &[u8]) -> Self {
        (get_u64(buf, 0), get_u64(buf, 8))
    }
}

impl Message for (u64, u64) {
    fn key(&self) -> u64 {
        self.0
    }
}

/// Block transfer counters for the simulated external-memory model.
/// `memory` (M) and `block` (B) are measured in items.
#[derive(Debug)]
pub struct IoMeter {
    memory: usize,
    block: usize,
    reads: AtomicU64,
    writes: AtomicU64,
}

impl IoMeter {
    pub fn new(memory: usize, block: usize) -> Result<Self> {
        if block == 0 || memory < 2 * block {
            return Err(Error::invalid(format!(
                "need B >= 1 and M >= 2B, got M = {memory}, B = {block}"
            )));
        }
        Ok(IoMeter {
            memory,
            block,
            reads: AtomicU64::new(0),
            writes: AtomicU64::new(0),
        })
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// Number of runs merged at once, `M / B`.
    pub fn fan_in(&self) -> usize {
        self.memory / self.block
    }

    pub fn reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn writes(&self) -> u64 {
        self.writes.load(Ordering::Relaxed)
    }

    pub fn total(&self) -> u64 {
        self.reads() + self.writes()
    }

    pub fn reset(&self) {
        self.reads.store(0, Ordering::Relaxed);
        self.writes.store(0, Ordering::Relaxed);
    }

    pub(crate) fn add_read(&self) {
        self.reads.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn add_write(&self) {
        self.writes.fetch_add(1, Ordering::Relaxed);
    }
}

#[derive(Debug)]
pub struct FileStore {
    dir: PathBuf,
    meter: IoMeter,
}

impl FileStore {
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn meter(&self) -> &IoMeter {
        &self.meter
    }

    pub(crate) fn spill_file(&self) -> Result<File> {
        tempfile::tempfile_in(&self.dir).map_err(|e| Error::io(&self.dir, e))
    }

    pub(crate) fn err(&self, e: std::io::Error) -> Error {
        Error::io(&self.dir, e)
    }
}

/// Where sorters and queues keep their items.
#[derive(Clone, Debug, Default)]
pub enum Storage {
    #[default]
    Memory,
    File(Arc<FileStore>),
}

impl Storage {
    /// File-backed storage spilling into `dir` (created if missing).
    pub fn file(dir: impl Into<PathBuf>, memory: usize, block: usize) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Storage::File(Arc::new(FileStore {
            dir,
            meter: IoMeter::new(memory, block)?,
        })))
    }

    /// File-backed storage in the system temporary directory.
    pub fn temp(memory: usize, block: usize) -> Result<Self> {
        Self::file(std::env::temp_dir(), memory, block)
    }

    pub fn is_file(&self) -> bool {
        matches!(self, Storage::File(_))
    }

    pub fn meter(&self) -> Option<&IoMeter> {
        match self {
            Storage::Memory => None,
            Storage::File(f) => Some(&f.meter),
        }
    }
}

/// Block counts of scanning and sorting `n` items.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IoCurves {
    pub scan: u64,
    pub sort: u64,
}

/// `scan = ⌈n/B⌉`, `sort = scan · max(1, ⌈log_{M/B}(n/B)⌉)`.
pub fn io_reference_curves(n: u64, memory: u64, block: u64) -> Result<IoCurves> {
    if block == 0 || memory < 2 * block {
        return Err(Error::invalid(format!(
            "need B >= 1 and M >= 2B, got M = {memory}, B = {block}"
        )));
    }
    let scan = n.div_ceil(block);
    let fan = u128::from(memory / block);
    // smallest L >= 1 with fan^L * B >= n
    let mut passes = 1u64;
    let mut reach = fan * u128::from(block);
    while reach < u128::from(n) {
        reach *= fan;
        passes += 1;
    }
    Ok(IoCurves {
        scan,
        sort: scan * passes,
    })
}
