pub mod emcb;
pub mod error;
pub mod esmc;
pub mod graph;
pub mod imcb;
pub mod lcg;
pub mod mixing;
pub mod pgcb;
pub mod tfp;
pub mod trade;

pub use error::{Error, Result};
pub use graph::{DegreeSequence, Edge, Graph, Node, PowerlawSpec};
pub use lcg::LcgMap;
pub use trade::{GlobalTradeDescriptor, TradePair, TradeRandomnessOracle, TradeSequence};
