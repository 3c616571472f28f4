//! Circuit graph: signal-data nodes, gate nodes, and typed reader/writer
//! edges between them.
//!
//! The graph is bipartite. A signal has at most one writer and any number of
//! readers. Each edge carries the [`SignalType`] through which the gate sees
//! the signal, so casts never create gates.

mod gate;
mod graph;
mod types;

pub use gate::*;
pub use graph::*;
pub use types::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignalId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleId(pub u32);

impl SignalId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ModuleId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}
