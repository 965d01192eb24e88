use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("self-loop at line {line}: {node}")]
    SelfLoop { line: usize, node: u32 },

    #[error("duplicate edge {{{u},{v}}} at line {line}")]
    DuplicateEdge { line: usize, u: u32, v: u32 },

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: u64, n: usize },

    #[error("degree sequence is not graphical: {0}")]
    NotGraphical(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trade between identical nodes {0}")]
    DegenerateTrade(u32),

    #[error("sorter phase violation: {0}")]
    Phase(&'static str),

    #[error("priority queue is empty")]
    EmptyQueue,

    #[error("message targets position {target} behind current position {current}")]
    BackwardMessage { target: u64, current: u64 },

    #[error("trade at round {round}, slot {slot} never received all its neighbors")]
    Stalled { round: usize, slot: u64 },

    #[error("value {0} is not in the image of the map")]
    NotInImage(u64),

    #[error("state space too large to enumerate: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
