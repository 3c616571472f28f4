use super::{Edge, GateId, GateKind, Init, ModuleId, SignalId, SignalType, TriggerSpec};
use crate::logic::Logic;
use std::fmt::Write as _;

/// Explicit or inferred port direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PortDir {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalData {
    pub id: SignalId,
    /// Zero only for enum-typed signals before their enum is frozen.
    pub width: usize,
    /// Declared type.
    pub ty: SignalType,
    pub init: Init,
    pub writer: Option<Edge>,
    pub readers: Vec<Edge>,
    pub name: Option<String>,
    pub tracked: bool,
    pub owner: Option<ModuleId>,
    pub mark: Option<PortDir>,
    /// Literal operand; emitted inline rather than as a net.
    pub is_const: bool,
}

impl SignalData {
    /// Initial value as a concrete `Logic`. Enum codes must already be
    /// resolved to `Init::Value` (done at freeze).
    pub fn init_value(&self) -> Logic {
        match &self.init {
            Init::Unknown => Logic::unknown(self.width),
            Init::Value(v) => v.clone(),
            Init::EnumState(_) => panic!("unresolved enum init on signal {}", self.id.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub inputs: Vec<Edge>,
    /// Sensitive inputs. Empty means every input is level-sensitive.
    pub triggers: Vec<TriggerSpec>,
    pub outputs: Vec<Edge>,
    /// Time slots between execution and the visible output update.
    pub delay: u32,
    pub always_full_sim: bool,
    /// Module the gate's logic lives in (`None` = top level).
    pub location: Option<ModuleId>,
}

impl Gate {
    /// Whether input `i` can wake the gate.
    pub fn is_sensitive(&self, i: usize) -> bool {
        self.triggers.is_empty() || self.triggers.iter().any(|t| t.input == i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Read,
    Write,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("signal width must be at least 1")]
    ZeroWidth,
    #[error("multiple drivers on signal {signal}: gates {existing} and {new}")]
    MultipleDrivers { signal: u32, existing: u32, new: u32 },
    #[error("no such {0} {1}")]
    Dangling(&'static str, u32),
}

/// A broken structural invariant found by [`Graph::audit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    pub(crate) signals: Vec<SignalData>,
    pub(crate) gates: Vec<Gate>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn signals(&self) -> &[SignalData] {
        &self.signals
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn signal(&self, id: SignalId) -> &SignalData {
        &self.signals[id.index()]
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub(crate) fn signal_mut(&mut self, id: SignalId) -> &mut SignalData {
        &mut self.signals[id.index()]
    }

    pub(crate) fn gate_mut(&mut self, id: GateId) -> &mut Gate {
        &mut self.gates[id.index()]
    }

    /// Adds a signal node with no writer. Width 0 is only accepted for
    /// enum-typed signals, whose width is fixed later.
    pub fn add_signal(
        &mut self,
        width: usize,
        ty: SignalType,
        name: Option<String>,
        init: Init,
    ) -> Result<SignalId, GraphError> {
        if width == 0 && ty.enum_id().is_none() {
            return Err(GraphError::ZeroWidth);
        }
        let id = SignalId(self.signals.len() as u32);
        self.signals.push(SignalData {
            id,
            width,
            ty,
            init,
            writer: None,
            readers: Vec::new(),
            name,
            tracked: false,
            owner: None,
            mark: None,
            is_const: false,
        });
        Ok(id)
    }

    pub fn add_gate(&mut self, kind: GateKind, delay: u32, location: Option<ModuleId>) -> GateId {
        let id = GateId(self.gates.len() as u32);
        self.gates.push(Gate {
            id,
            kind,
            inputs: Vec::new(),
            triggers: Vec::new(),
            outputs: Vec::new(),
            delay,
            always_full_sim: false,
            location,
        });
        id
    }

    /// Registers an edge on both endpoints and returns its index in the
    /// gate's input or output list.
    pub fn connect(
        &mut self,
        gate: GateId,
        signal: SignalId,
        dir: Direction,
        ty: SignalType,
    ) -> Result<usize, GraphError> {
        if gate.index() >= self.gates.len() {
            return Err(GraphError::Dangling("gate", gate.0));
        }
        if signal.index() >= self.signals.len() {
            return Err(GraphError::Dangling("signal", signal.0));
        }
        let edge = Edge { gate, signal, ty };
        match dir {
            Direction::Read => {
                self.signals[signal.index()].readers.push(edge.clone());
                let g = &mut self.gates[gate.index()];
                g.inputs.push(edge);
                Ok(g.inputs.len() - 1)
            }
            Direction::Write => {
                if let Some(w) = &self.signals[signal.index()].writer {
                    return Err(GraphError::MultipleDrivers {
                        signal: signal.0,
                        existing: w.gate.0,
                        new: gate.0,
                    });
                }
                self.signals[signal.index()].writer = Some(edge.clone());
                let g = &mut self.gates[gate.index()];
                g.outputs.push(edge);
                Ok(g.outputs.len() - 1)
            }
        }
    }

    /// Checks single-writer, edge symmetry, and width agreement. Returns
    /// every violation found; an empty list means the graph is sound.
    pub fn audit(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut writers_seen = vec![0usize; self.signals.len()];
        for g in &self.gates {
            for e in &g.outputs {
                if e.gate != g.id {
                    out.push(Violation(format!("gate {} output edge names gate {}", g.id.0, e.gate.0)));
                }
                let Some(s) = self.signals.get(e.signal.index()) else {
                    out.push(Violation(format!("gate {} writes missing signal {}", g.id.0, e.signal.0)));
                    continue;
                };
                writers_seen[e.signal.index()] += 1;
                if s.writer.as_ref().map(|w| w.gate) != Some(g.id) {
                    out.push(Violation(format!(
                        "signal {} does not list gate {} as writer",
                        s.id.0, g.id.0
                    )));
                }
                check_width(&mut out, s, e);
            }
            for e in &g.inputs {
                let Some(s) = self.signals.get(e.signal.index()) else {
                    out.push(Violation(format!("gate {} reads missing signal {}", g.id.0, e.signal.0)));
                    continue;
                };
                let listed = s.readers.iter().filter(|r| r.gate == g.id).count();
                let used = g.inputs.iter().filter(|i| i.signal == s.id).count();
                if listed != used {
                    out.push(Violation(format!(
                        "signal {} lists {} reader edges for gate {}, gate has {}",
                        s.id.0, listed, g.id.0, used
                    )));
                }
                check_width(&mut out, s, e);
            }
            for t in &g.triggers {
                if t.input >= g.inputs.len() {
                    out.push(Violation(format!("gate {} trigger on missing input {}", g.id.0, t.input)));
                }
            }
        }
        for s in &self.signals {
            if writers_seen[s.id.index()] > 1 {
                out.push(Violation(format!(
                    "signal {} is driven by {} gates",
                    s.id.0,
                    writers_seen[s.id.index()]
                )));
            }
            if let Some(w) = &s.writer {
                if w.gate.index() >= self.gates.len() {
                    out.push(Violation(format!("signal {} writer {} missing", s.id.0, w.gate.0)));
                } else if writers_seen[s.id.index()] == 0 {
                    out.push(Violation(format!("signal {} writer edge not on gate {}", s.id.0, w.gate.0)));
                }
            }
            for r in &s.readers {
                if r.gate.index() >= self.gates.len() {
                    out.push(Violation(format!("signal {} reader {} missing", s.id.0, r.gate.0)));
                }
            }
            if let Init::Value(v) = &s.init {
                if s.width != 0 && v.width() != s.width {
                    out.push(Violation(format!(
                        "signal {} init width {} != {}",
                        s.id.0,
                        v.width(),
                        s.width
                    )));
                }
            }
        }
        out
    }

    /// Deterministic text listing, sorted by id.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for sig in &self.signals {
            let init = match &sig.init {
                Init::Unknown => "x".to_string(),
                Init::Value(v) => v.to_string(),
                Init::EnumState(i) => format!("state#{i}"),
            };
            let writer = sig
                .writer
                .as_ref()
                .map(|w| format!("g{}", w.gate.0))
                .unwrap_or_else(|| "-".into());
            let readers: Vec<String> = sig.readers.iter().map(|r| format!("g{}", r.gate.0)).collect();
            let _ = writeln!(
                s,
                "s{} {:?} {} w={} init={} writer={} readers=[{}]",
                sig.id.0,
                sig.name.as_deref().unwrap_or(""),
                sig.ty,
                sig.width,
                init,
                writer,
                readers.join(",")
            );
        }
        for g in &self.gates {
            let ins: Vec<String> = g.inputs.iter().map(|e| format!("s{}:{}", e.signal.0, e.ty)).collect();
            let outs: Vec<String> = g.outputs.iter().map(|e| format!("s{}:{}", e.signal.0, e.ty)).collect();
            let _ = writeln!(
                s,
                "g{} {} delay={} full={} in=[{}] out=[{}]",
                g.id.0,
                g.kind.name(),
                g.delay,
                g.always_full_sim,
                ins.join(","),
                outs.join(",")
            );
        }
        s
    }
}

fn check_width(out: &mut Vec<Violation>, s: &SignalData, e: &Edge) {
    if let Some(w) = e.ty.fixed_width() {
        if s.width != 0 && w != s.width {
            out.push(Violation(format!(
                "edge g{}-s{} type {} has width {} but signal has {}",
                e.gate.0, s.id.0, e.ty, w, s.width
            )));
        }
    }
}
