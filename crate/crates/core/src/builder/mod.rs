//! Circuit construction API.
//!
//! A [`Circuit`] records signals and gates into a [`Graph`] while tracking
//! the module, condition, and clock-domain context of every call. Operators
//! create combinational gates; assignments accumulate on netlist gates
//! (Wire/Reg/Latch). [`Circuit::elaborate`] freezes enums, resolves
//! connections, infers module ports, and returns an immutable [`Design`].

mod array;
mod cond;
mod module;
mod netlist;
mod params;

pub use array::{zip_map, HArray};
pub use cond::{CaseLabel, FrameInfo, FrameKind};
pub use module::{Design, Instance, ModuleDef, Port};
pub use netlist::{ClockDomain, DefaultClock, Mem, Reset};
pub use params::{ParamScope, ParamTree, ParamValue};

use crate::ir::{
    Direction, EnumDef, EnumEncoding, EnumError, EnumId, GateId, GateKind, Graph, GraphError, Init,
    ModuleId, PortDir, SignalId, SignalType,
};
use crate::logic::{BitPat, CmpOp, Logic, LogicError, ReduceKind};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error("cannot assign to `{0}`: it is driven by a {1} gate")]
    NotAssignable(String, &'static str),
    #[error("width mismatch in {what}: expected {expected}, got {got}")]
    Width {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("{0}")]
    Shape(String),
    #[error("unbalanced construct: {0}")]
    Unbalanced(&'static str),
    #[error("operand width of `{0}` is not known until elaboration")]
    PendingWidth(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("connect: {0}")]
    Connect(String),
    #[error("port inference: {0}")]
    Port(String),
    #[error("range [{low}, {low}+{count}) exceeds width {width}")]
    Range {
        low: usize,
        count: usize,
        width: usize,
    },
    #[error("graph audit failed: {0:?}")]
    Audit(Vec<String>),
}

pub type Result<T, E = BuildError> = std::result::Result<T, E>;

/// How a gate reads a signal. Casts only change the edge type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    Declared,
    Unsigned,
    Signed,
}

/// Handle to a signal in a [`Circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signal {
    pub id: SignalId,
    pub view: View,
}

impl Signal {
    pub fn new(id: SignalId) -> Signal {
        Signal {
            id,
            view: View::Declared,
        }
    }

    pub fn signed(self) -> Signal {
        Signal {
            view: View::Signed,
            ..self
        }
    }

    pub fn unsigned(self) -> Signal {
        Signal {
            view: View::Unsigned,
            ..self
        }
    }
}

impl From<Signal> for SignalId {
    fn from(s: Signal) -> SignalId {
        s.id
    }
}

impl From<SignalId> for Signal {
    fn from(id: SignalId) -> Signal {
        Signal::new(id)
    }
}

/// A value usable where a signal is expected. Literals adopt the width of
/// the signal they are combined with; text names an enum state when the
/// context is enum-typed and is parsed as a literal otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Sig(Signal),
    Lit(Logic),
    Int(i64),
    Text(String),
}

impl From<Signal> for Operand {
    fn from(s: Signal) -> Operand {
        Operand::Sig(s)
    }
}

impl From<&Signal> for Operand {
    fn from(s: &Signal) -> Operand {
        Operand::Sig(*s)
    }
}

impl From<Logic> for Operand {
    fn from(l: Logic) -> Operand {
        Operand::Lit(l)
    }
}

impl From<i64> for Operand {
    fn from(v: i64) -> Operand {
        Operand::Int(v)
    }
}

impl From<i32> for Operand {
    fn from(v: i32) -> Operand {
        Operand::Int(v as i64)
    }
}

impl From<u32> for Operand {
    fn from(v: u32) -> Operand {
        Operand::Int(v as i64)
    }
}

impl From<bool> for Operand {
    fn from(v: bool) -> Operand {
        Operand::Int(v as i64)
    }
}

impl From<&str> for Operand {
    fn from(v: &str) -> Operand {
        Operand::Text(v.to_string())
    }
}

impl From<String> for Operand {
    fn from(v: String) -> Operand {
        Operand::Text(v)
    }
}

/// Operators accepted by [`Circuit::build_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Not,
    And,
    Or,
    Xor,
    Reduce(ReduceKind),
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Cmp(CmpOp),
    Cat,
    /// Operands: select, value when 0, value when 1.
    Mux,
}

/// Gate delays used for newly created gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delays {
    pub comb: u32,
    pub reg: u32,
    /// Wire netlists (assignment targets); 0 settles in delta sub-slots.
    pub wire: u32,
}

impl Default for Delays {
    fn default() -> Delays {
        Delays {
            comb: 1,
            reg: 1,
            wire: 0,
        }
    }
}

pub struct Circuit {
    pub(crate) graph: Graph,
    pub(crate) enums: Vec<EnumDef>,
    pub(crate) modules: Vec<ModuleDef>,
    pub(crate) frames: Vec<FrameInfo>,
    open: Vec<cond::OpenFrame>,
    module_stack: Vec<ModuleId>,
    domains: Vec<ClockDomain>,
    default_clock: Option<DefaultClock>,
    params: Vec<ParamScope>,
    connects: Vec<(SignalId, SignalId)>,
    input_slots: HashMap<(GateId, SignalId), usize>,
    delays: Delays,
}

impl Default for Circuit {
    fn default() -> Circuit {
        Circuit::new()
    }
}

impl Circuit {
    pub fn new() -> Circuit {
        Circuit::with_params(ParamTree::new())
    }

    pub fn with_params(tree: ParamTree) -> Circuit {
        Circuit {
            graph: Graph::new(),
            enums: Vec::new(),
            modules: Vec::new(),
            frames: Vec::new(),
            open: Vec::new(),
            module_stack: Vec::new(),
            domains: Vec::new(),
            default_clock: None,
            params: vec![ParamScope::root(&tree)],
            connects: Vec::new(),
            input_slots: HashMap::new(),
            delays: Delays::default(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn delays(&self) -> Delays {
        self.delays
    }

    pub fn set_delays(&mut self, d: Delays) {
        self.delays = d;
    }

    pub fn width(&self, s: Signal) -> usize {
        self.graph.signal(s.id).width
    }

    pub(crate) fn location(&self) -> Option<ModuleId> {
        self.module_stack.last().copied()
    }

    // ---- declaration ----

    /// Declares a signal owned by the current module.
    pub fn signal(&mut self, name: &str, ty: SignalType, init: Init) -> Result<Signal> {
        let width = match ty.enum_id() {
            Some(_) => 0,
            None => ty.fixed_width().ok_or_else(|| BuildError::Type(format!("{ty} has no width")))?,
        };
        if let Init::Value(v) = &init {
            if v.width() != width {
                return Err(BuildError::Width {
                    what: "initial value",
                    expected: width,
                    got: v.width(),
                });
            }
        }
        let name = (!name.is_empty()).then(|| name.to_string());
        let id = self.graph.add_signal(width, ty, name, init)?;
        self.graph.signal_mut(id).owner = self.location();
        Ok(Signal::new(id))
    }

    /// `UInt[w](init)`.
    pub fn uint(&mut self, name: &str, width: usize, init: u64) -> Result<Signal> {
        let v = Logic::try_from_u64(width, init)?;
        self.signal(name, SignalType::UInt(width), Init::Value(v))
    }

    /// `SInt[w](init)`.
    pub fn sint(&mut self, name: &str, width: usize, init: i64) -> Result<Signal> {
        let v = int_logic(init, width)?;
        self.signal(name, SignalType::SInt(width), Init::Value(v))
    }

    /// Unsigned signal with no initial value (reads X until driven).
    pub fn uint_x(&mut self, name: &str, width: usize) -> Result<Signal> {
        self.signal(name, SignalType::UInt(width), Init::Unknown)
    }

    /// `UInt[w](init) @ Input`.
    pub fn input(&mut self, name: &str, width: usize, init: u64) -> Result<Signal> {
        let s = self.uint(name, width, init)?;
        self.mark(s, PortDir::Input);
        Ok(s)
    }

    /// `UInt[w](init) @ Output`.
    pub fn output(&mut self, name: &str, width: usize, init: u64) -> Result<Signal> {
        let s = self.uint(name, width, init)?;
        self.mark(s, PortDir::Output);
        Ok(s)
    }

    /// Explicit port direction, overriding inference.
    pub fn mark(&mut self, s: Signal, dir: PortDir) {
        self.graph.signal_mut(s.id).mark = Some(dir);
    }

    /// Sets the name hint of `s`.
    pub fn name(&mut self, s: Signal, name: &str) -> Signal {
        self.graph.signal_mut(s.id).name = Some(name.to_string());
        s
    }

    pub fn constant(&mut self, value: Logic) -> Result<Signal> {
        let ty = SignalType::UInt(value.width());
        let id = self.graph.add_signal(value.width(), ty, None, Init::Value(value))?;
        let s = self.graph.signal_mut(id);
        s.owner = self.module_stack.last().copied();
        s.is_const = true;
        Ok(Signal::new(id))
    }

    // ---- enums ----

    pub fn new_enum(&mut self, name: &str, encoding: EnumEncoding) -> EnumId {
        self.enums.push(EnumDef::new(name, encoding));
        EnumId(self.enums.len() as u32 - 1)
    }

    pub fn enum_def(&self, e: EnumId) -> &EnumDef {
        &self.enums[e.0 as usize]
    }

    /// Constant signal holding the code of `state`, interning it if new.
    pub fn enum_state(&mut self, e: EnumId, state: &str) -> Result<Signal> {
        let (idx, _) = self.enums[e.0 as usize].intern(state)?;
        let id = self
            .graph
            .add_signal(0, SignalType::Enum(e), None, Init::EnumState(idx))?;
        let s = self.graph.signal_mut(id);
        s.owner = self.module_stack.last().copied();
        s.is_const = true;
        Ok(Signal::new(id))
    }

    // ---- gate plumbing ----

    pub(crate) fn view_ty(&self, s: Signal) -> SignalType {
        let d = self.graph.signal(s.id);
        match (s.view, &d.ty) {
            (_, SignalType::Enum(_)) | (View::Declared, _) => d.ty.clone(),
            (View::Unsigned, _) => SignalType::UInt(d.width),
            (View::Signed, _) => SignalType::SInt(d.width),
        }
    }

    pub(crate) fn is_signed(&self, s: Signal) -> bool {
        self.view_ty(s).is_signed()
    }

    fn enum_of(&self, s: Signal) -> Option<EnumId> {
        self.graph.signal(s.id).ty.enum_id()
    }

    fn describe(&self, s: Signal) -> String {
        let d = self.graph.signal(s.id);
        match &d.name {
            Some(n) => n.clone(),
            None => format!("s{}", s.id.0),
        }
    }

    /// Reads `s` from gate `g`, reusing an existing edge of the same signal.
    pub(crate) fn read_shared(&mut self, g: GateId, s: Signal) -> Result<usize> {
        if let Some(i) = self.input_slots.get(&(g, s.id)) {
            return Ok(*i);
        }
        let ty = self.view_ty(s);
        let i = self.graph.connect(g, s.id, Direction::Read, ty)?;
        self.input_slots.insert((g, s.id), i);
        Ok(i)
    }

    fn read(&mut self, g: GateId, s: Signal) -> Result<usize> {
        let ty = self.view_ty(s);
        Ok(self.graph.connect(g, s.id, Direction::Read, ty)?)
    }

    /// Creates a combinational gate reading `inputs` and writing a fresh
    /// anonymous signal of type `out`.
    pub(crate) fn gate(&mut self, kind: GateKind, inputs: &[Signal], out: SignalType) -> Result<Signal> {
        let g = self.graph.add_gate(kind, self.delays.comb, self.location());
        for s in inputs {
            self.read(g, *s)?;
        }
        let width = out.fixed_width().unwrap_or(0);
        let id = self.graph.add_signal(width, out.clone(), None, Init::Unknown)?;
        self.graph.signal_mut(id).owner = self.location();
        self.graph.connect(g, id, Direction::Write, out)?;
        Ok(Signal::new(id))
    }

    /// Turns an operand into a signal of `width` bits (or of `enum_ctx`).
    pub(crate) fn materialize(
        &mut self,
        op: &Operand,
        width: Option<usize>,
        enum_ctx: Option<EnumId>,
    ) -> Result<Signal> {
        match op {
            Operand::Sig(s) => Ok(*s),
            Operand::Lit(l) => self.constant(l.clone()),
            Operand::Int(i) => {
                let w = width.unwrap_or_else(|| min_width(*i));
                self.constant(int_logic(*i, w)?)
            }
            Operand::Text(t) => match enum_ctx {
                Some(e) => self.enum_state(e, t),
                None => {
                    let l: Logic = t.parse()?;
                    self.constant(l)
                }
            },
        }
    }

    /// Zero- or sign-extends or truncates `s` to `width` bits.
    pub fn resize(&mut self, s: Signal, width: usize, signed: bool) -> Result<Signal> {
        let w = self.known_width(s)?;
        if w == width {
            return Ok(s);
        }
        let out = if signed {
            SignalType::SInt(width)
        } else {
            SignalType::UInt(width)
        };
        self.gate(GateKind::Resize { width, signed }, &[s], out)
    }

    fn known_width(&self, s: Signal) -> Result<usize> {
        match self.width(s) {
            0 => Err(BuildError::PendingWidth(self.describe(s))),
            w => Ok(w),
        }
    }

    /// Brings two operands to a common width: literals adopt the signal's
    /// width; a narrower signal is extended by its own signedness.
    fn pair(&mut self, a: &Operand, b: &Operand) -> Result<(Signal, Signal)> {
        let sig_of = |o: &Operand| match o {
            Operand::Sig(s) => Some(*s),
            _ => None,
        };
        let enum_ctx = sig_of(a)
            .and_then(|s| self.enum_of(s))
            .or_else(|| sig_of(b).and_then(|s| self.enum_of(s)));
        if let Some(e) = enum_ctx {
            let sa = self.materialize(a, None, Some(e))?;
            let sb = self.materialize(b, None, Some(e))?;
            if self.enum_of(sa) != Some(e) || self.enum_of(sb) != Some(e) {
                return Err(BuildError::Type("enum compared with a non-enum value".into()));
            }
            return Ok((sa, sb));
        }
        let wa = sig_of(a).map(|s| self.width(s));
        let wb = sig_of(b).map(|s| self.width(s));
        let sa = self.materialize(a, wb, None)?;
        let sb = self.materialize(b, wa.or(Some(self.width(sa))), None)?;
        let (wa, wb) = (self.width(sa), self.width(sb));
        let w = wa.max(wb);
        let ea = self.is_signed(sa);
        let eb = self.is_signed(sb);
        let sa = self.resize(sa, w, ea)?;
        let sb = self.resize(sb, w, eb)?;
        Ok((sa, sb))
    }

    /// Applies an operator, creating one gate (plus extension gates for
    /// mismatched widths) and returning its output.
    pub fn build_op(&mut self, op: Op, operands: &[Operand]) -> Result<Signal> {
        let arity = |n: usize| {
            if operands.len() == n {
                Ok(())
            } else {
                Err(BuildError::Shape(format!("{op:?} takes {n} operands, got {}", operands.len())))
            }
        };
        match op {
            Op::Not => {
                arity(1)?;
                let a = self.materialize(&operands[0], None, None)?;
                let w = self.known_width(a)?;
                let ty = plain(self.view_ty(a), w);
                self.gate(GateKind::Not, &[a], ty)
            }
            Op::Reduce(kind) => {
                arity(1)?;
                let a = self.materialize(&operands[0], None, None)?;
                self.known_width(a)?;
                self.gate(GateKind::Reduce(kind), &[a], SignalType::UInt(1))
            }
            Op::And | Op::Or | Op::Xor => {
                arity(2)?;
                let (a, b) = self.pair(&operands[0], &operands[1])?;
                let w = self.known_width(a)?;
                let kind = match op {
                    Op::And => GateKind::And,
                    Op::Or => GateKind::Or,
                    _ => GateKind::Xor,
                };
                let signed = self.is_signed(a) && self.is_signed(b);
                self.gate(kind, &[a, b], int_ty(w, signed))
            }
            Op::Add | Op::Sub | Op::Mul => {
                arity(2)?;
                let (a, b) = self.pair(&operands[0], &operands[1])?;
                let w = self.known_width(a)?;
                let signed = self.is_signed(a) && self.is_signed(b);
                let (kind, ow) = match op {
                    Op::Add => (GateKind::Add { signed }, w + 1),
                    Op::Sub => (GateKind::Sub { signed }, w + 1),
                    _ => (GateKind::Mul { signed }, 2 * w),
                };
                self.gate(kind, &[a, b], int_ty(ow, signed))
            }
            Op::Div | Op::Rem => {
                arity(2)?;
                let (a, b) = self.pair(&operands[0], &operands[1])?;
                let w = self.known_width(a)?;
                let kind = if op == Op::Div { GateKind::Div } else { GateKind::Rem };
                self.gate(kind, &[a.unsigned(), b.unsigned()], SignalType::UInt(w))
            }
            Op::Cmp(cmp) => {
                arity(2)?;
                let (a, b) = self.pair(&operands[0], &operands[1])?;
                let is_enum = self.enum_of(a).is_some();
                if is_enum && !matches!(cmp, CmpOp::Eq | CmpOp::Ne) {
                    return Err(BuildError::Type("enums support only == and !=".into()));
                }
                let signed = self.is_signed(a) && self.is_signed(b);
                self.gate(GateKind::Cmp { op: cmp, signed }, &[a, b], SignalType::UInt(1))
            }
            Op::Cat => {
                if operands.is_empty() {
                    return Err(LogicError::EmptyCat.into());
                }
                let mut parts = Vec::with_capacity(operands.len());
                let mut w = 0;
                for o in operands {
                    let s = self.materialize(o, None, None)?;
                    w += self.known_width(s)?;
                    parts.push(s);
                }
                self.gate(GateKind::Cat, &parts, SignalType::UInt(w))
            }
            Op::Mux => {
                arity(3)?;
                let sel = self.materialize(&operands[0], Some(1), None)?;
                let sel = self.truth(sel)?;
                let (a0, a1) = self.pair(&operands[1], &operands[2])?;
                let ty = self.view_ty(a0);
                let w = self.width(a0);
                let ty = if w == 0 { ty } else { plain(ty, w) };
                self.gate(GateKind::Mux, &[sel, a0, a1], ty)
            }
        }
    }

    /// One-bit truth value of `s` (OR-reduction if wider).
    pub fn truth(&mut self, s: Signal) -> Result<Signal> {
        match self.known_width(s)? {
            1 => Ok(s),
            _ => self.gate(GateKind::Reduce(ReduceKind::Or), &[s], SignalType::UInt(1)),
        }
    }

    // ---- operator shorthands ----

    pub fn not(&mut self, a: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Not, &[a.into()])
    }

    pub fn and(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::And, &[a.into(), b.into()])
    }

    pub fn or(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Or, &[a.into(), b.into()])
    }

    pub fn xor(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Xor, &[a.into(), b.into()])
    }

    pub fn add(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Add, &[a.into(), b.into()])
    }

    pub fn sub(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Sub, &[a.into(), b.into()])
    }

    pub fn mul(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Mul, &[a.into(), b.into()])
    }

    pub fn div(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Div, &[a.into(), b.into()])
    }

    pub fn rem(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Rem, &[a.into(), b.into()])
    }

    pub fn cmp(&mut self, op: CmpOp, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Cmp(op), &[a.into(), b.into()])
    }

    pub fn eq(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.cmp(CmpOp::Eq, a, b)
    }

    pub fn ne(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.cmp(CmpOp::Ne, a, b)
    }

    pub fn lt(&mut self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Signal> {
        self.cmp(CmpOp::Lt, a, b)
    }

    pub fn reduce(&mut self, kind: ReduceKind, a: impl Into<Operand>) -> Result<Signal> {
        self.build_op(Op::Reduce(kind), &[a.into()])
    }

    pub fn mux(
        &mut self,
        sel: impl Into<Operand>,
        when0: impl Into<Operand>,
        when1: impl Into<Operand>,
    ) -> Result<Signal> {
        self.build_op(Op::Mux, &[sel.into(), when0.into(), when1.into()])
    }

    /// Concatenation, first operand at the least-significant end.
    pub fn cat(&mut self, parts: &[Operand]) -> Result<Signal> {
        self.build_op(Op::Cat, parts)
    }

    /// Static part-select `[low, low + count)`; out-of-range bits read X.
    pub fn select(&mut self, a: Signal, low: usize, count: usize) -> Result<Signal> {
        self.known_width(a)?;
        if count == 0 {
            return Err(LogicError::ZeroWidth.into());
        }
        self.gate(GateKind::Select { low, count }, &[a], SignalType::UInt(count))
    }

    pub fn bit(&mut self, a: Signal, i: usize) -> Result<Signal> {
        self.select(a, i, 1)
    }

    /// One-bit slices, least-significant first.
    pub fn split(&mut self, a: Signal) -> Result<Vec<Signal>> {
        let w = self.known_width(a)?;
        (0..w).map(|i| self.bit(a, i)).collect()
    }

    /// Part-select at a runtime index; X index reads all-X.
    pub fn dyn_select(&mut self, a: Signal, idx: Signal, count: usize) -> Result<Signal> {
        self.known_width(a)?;
        self.gate(GateKind::DynSelect { count }, &[a, idx.unsigned()], SignalType::UInt(count))
    }

    /// One-bit match against a pattern with don't-care positions.
    pub fn matches(&mut self, a: Signal, pat: &BitPat) -> Result<Signal> {
        let w = self.known_width(a)?;
        if pat.width() != w {
            return Err(BuildError::Width {
                what: "pattern match",
                expected: w,
                got: pat.width(),
            });
        }
        self.gate(GateKind::Match(pat.clone()), &[a], SignalType::UInt(1))
    }

    /// Named field of a struct-typed signal.
    pub fn field(&mut self, s: Signal, name: &str) -> Result<Signal> {
        let SignalType::Struct(st) = self.graph.signal(s.id).ty.clone() else {
            return Err(BuildError::Type(format!("`{}` is not a struct", self.describe(s))));
        };
        let f = st
            .field(name)
            .ok_or_else(|| BuildError::Type(format!("no field `{name}`")))?;
        let w = f.ty.fixed_width().unwrap_or(0);
        let (offset, ty) = (f.offset, f.ty.clone());
        let out = self.gate(GateKind::Select { low: offset, count: w }, &[s], ty)?;
        Ok(out)
    }

    /// Element `i` of a vector-typed signal.
    pub fn element(&mut self, s: Signal, i: usize) -> Result<Signal> {
        let SignalType::Vector(elem, n) = self.graph.signal(s.id).ty.clone() else {
            return Err(BuildError::Type(format!("`{}` is not a vector", self.describe(s))));
        };
        if i >= n {
            return Err(BuildError::Shape(format!("index {i} out of {n}")));
        }
        let w = elem.fixed_width().unwrap_or(0);
        self.gate(GateKind::Select { low: i * w, count: w }, &[s], *elem)
    }

    /// Applies `op` elementwise over arrays, broadcasting leaves.
    pub fn vectorized(&mut self, op: Op, args: &[HArray<Operand>]) -> Result<HArray<Signal>> {
        zip_map(args, &mut |vals: &[Operand]| self.build_op(op, vals))
    }

    /// Marks signals for waveform recording.
    pub fn track(&mut self, signals: &[Signal]) {
        for s in signals {
            self.graph.signal_mut(s.id).tracked = true;
        }
    }
}

fn int_ty(w: usize, signed: bool) -> SignalType {
    if signed {
        SignalType::SInt(w)
    } else {
        SignalType::UInt(w)
    }
}

fn plain(ty: SignalType, w: usize) -> SignalType {
    match ty {
        SignalType::SInt(_) => SignalType::SInt(w),
        SignalType::Enum(_) => ty,
        _ => SignalType::UInt(w),
    }
}

/// Smallest two's-complement-free width holding `v` (at least 1).
fn min_width(v: i64) -> usize {
    if v < 0 {
        65 - (!v).leading_zeros() as usize
    } else {
        (64 - v.leading_zeros() as usize).max(1)
    }
}

/// `v` as a `width`-bit two's-complement value. Positive values that do
/// not fit are rejected; negative values wrap.
pub(crate) fn int_logic(v: i64, width: usize) -> Result<Logic> {
    if v >= 0 {
        if width < 64 && (v as u64) >> width != 0 {
            return Err(LogicError::Overflow(format!("{width}'d{v}")).into());
        }
        return Ok(Logic::from_u64(width.min(64), v as u64).resize(width, false));
    }
    Ok(Logic::from_u64(64, v as u64).resize(width, true))
}

#[cfg(test)]
mod tests;
