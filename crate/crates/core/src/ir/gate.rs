use super::{ModuleId, SignalType};
use crate::logic::{BitPat, CmpOp, Logic, ReduceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameId(pub u32);

/// Edge polarity for clocks and edge triggers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Pos,
    Neg,
}

/// How a gate reacts to a change on one of its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Level,
    Edge(EdgeKind),
}

/// A sensitive input of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriggerSpec {
    pub input: usize,
    pub sense: Sense,
}

/// Which bits of the netlist output an assignment writes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetRange {
    Full,
    Static { low: usize, count: usize },
    /// `count` bits starting at the value of input `idx`.
    Dynamic { idx: usize, count: usize },
}

/// One conjunct of an assignment condition: input `input` must evaluate to
/// `polarity`. Terms from a `unique` switch poison the result when X.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CondTerm {
    pub input: usize,
    pub polarity: bool,
    pub unique: bool,
}

/// Position of an assignment in the when/switch tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CondRef {
    pub frame: FrameId,
    pub branch: usize,
}

/// A recorded conditional assignment on a netlist gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub path: Vec<CondRef>,
    pub conds: Vec<CondTerm>,
    /// Gate input holding the assigned value.
    pub value: usize,
    pub range: TargetRange,
    /// Module context the assignment was made from (`None` = top level).
    pub origin: Option<ModuleId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResetSpec {
    pub input: usize,
    /// Level at which reset is asserted.
    pub active: bool,
    pub asynchronous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetlistKind {
    /// Combinational: falls back to the signal's init value when no
    /// assignment applies.
    Wire,
    /// Edge-triggered storage; holds its value between active edges.
    Reg {
        clock: usize,
        edge: EdgeKind,
        reset: Option<ResetSpec>,
    },
    /// Level-sensitive storage, transparent while `enable` equals `active`.
    Latch { enable: usize, active: bool },
}

/// Connection semantics for Wire/Reg/Latch: a prioritized list of
/// assignments, later entries overriding earlier ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    pub kind: NetlistKind,
    pub assigns: Vec<Assignment>,
    /// Signedness of the target, used to adapt value widths.
    pub signed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    Not,
    And,
    Or,
    Xor,
    Reduce(ReduceKind),
    Add { signed: bool },
    Sub { signed: bool },
    Mul { signed: bool },
    Div,
    Rem,
    Cmp { op: CmpOp, signed: bool },
    /// First input at the least-significant end.
    Cat,
    Select { low: usize, count: usize },
    /// Inputs: value, index.
    DynSelect { count: usize },
    Resize { width: usize, signed: bool },
    Match(BitPat),
    /// Inputs: select, value when 0, value when 1.
    Mux,
    Netlist(Box<Netlist>),
    /// Tri-state driver. Inputs: enable, driver. Reads X when disabled.
    Tri,
    /// Inputs: address, then the memory words.
    MemRead { depth: usize },
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Xor => "xor",
            GateKind::Reduce(ReduceKind::And) => "reduce_and",
            GateKind::Reduce(ReduceKind::Or) => "reduce_or",
            GateKind::Reduce(ReduceKind::Xor) => "reduce_xor",
            GateKind::Add { .. } => "add",
            GateKind::Sub { .. } => "sub",
            GateKind::Mul { .. } => "mul",
            GateKind::Div => "div",
            GateKind::Rem => "rem",
            GateKind::Cmp { .. } => "cmp",
            GateKind::Cat => "cat",
            GateKind::Select { .. } => "select",
            GateKind::DynSelect { .. } => "dyn_select",
            GateKind::Resize { .. } => "resize",
            GateKind::Match(_) => "match",
            GateKind::Mux => "mux",
            GateKind::Netlist(n) => match n.kind {
                NetlistKind::Wire => "wire",
                NetlistKind::Reg { .. } => "reg",
                NetlistKind::Latch { .. } => "latch",
            },
            GateKind::Tri => "wtri",
            GateKind::MemRead { .. } => "mem_read",
        }
    }

    /// Gates that can produce X from binary inputs, or hold state, and so
    /// must always run the three-state function.
    pub fn needs_full_sim(&self, input_widths: &[usize], init_binary: bool) -> bool {
        match self {
            GateKind::Div | GateKind::Rem | GateKind::DynSelect { .. } | GateKind::Tri => true,
            GateKind::MemRead { .. } => true,
            GateKind::Select { low, count } => low + count > input_widths[0],
            GateKind::Netlist(n) => match n.kind {
                NetlistKind::Reg { .. } | NetlistKind::Latch { .. } => true,
                NetlistKind::Wire => !init_binary,
            },
            _ => false,
        }
    }
}

/// Reader or Writer edge. The type describes how the gate views the signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub gate: super::GateId,
    pub signal: super::SignalId,
    pub ty: SignalType,
}

pub type Reader = Edge;
pub type Writer = Edge;

/// Initial contents of a signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Init {
    /// All-X (undriven).
    Unknown,
    Value(Logic),
    /// Code of an enum state, resolved when the enum is frozen.
    EnumState(usize),
}
