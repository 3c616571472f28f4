//! Explicit netlists: registers, latches, tri-state wires, memories, and
//! clock domains.

use super::{BuildError, Circuit, Operand, Result, Signal};
use crate::ir::{
    Direction, EdgeKind, EnumId, GateKind, Init, Netlist, NetlistKind, ResetSpec, Sense, SignalId,
    SignalType, TriggerSpec,
};
use crate::logic::Logic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reset {
    pub signal: SignalId,
    /// Level at which reset is asserted.
    pub active: bool,
    pub asynchronous: bool,
}

/// Clock and optional reset governing registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockDomain {
    pub clock: SignalId,
    pub edge: EdgeKind,
    pub reset: Option<Reset>,
}

/// The implicit `clk`/`rst_n` pair, created on first use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefaultClock {
    pub clk: SignalId,
    pub rst_n: SignalId,
}

/// Word-addressed storage: one register per word plus a read port gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mem {
    pub words: Vec<Signal>,
    pub width: usize,
}

impl Circuit {
    fn root_signal(&mut self, name: &str, init: u64) -> Result<SignalId> {
        let id = self.graph.add_signal(
            1,
            SignalType::UInt(1),
            Some(name.to_string()),
            Init::Value(Logic::from_u64(1, init)),
        )?;
        Ok(id)
    }

    /// Default clock `clk` (posedge) with asynchronous active-low reset
    /// `rst_n`. Both live at the top level and are driven by the simulator.
    pub fn default_clock(&mut self) -> Result<DefaultClock> {
        if let Some(d) = self.default_clock {
            return Ok(d);
        }
        let clk = self.root_signal("clk", 0)?;
        let rst_n = self.root_signal("rst_n", 1)?;
        let d = DefaultClock { clk, rst_n };
        self.default_clock = Some(d);
        Ok(d)
    }

    pub fn default_domain(&mut self) -> Result<ClockDomain> {
        let d = self.default_clock()?;
        Ok(ClockDomain {
            clock: d.clk,
            edge: EdgeKind::Pos,
            reset: Some(Reset {
                signal: d.rst_n,
                active: false,
                asynchronous: true,
            }),
        })
    }

    /// Domain for new registers: innermost pushed domain, else the default.
    pub fn domain(&mut self) -> Result<ClockDomain> {
        match self.domains.last() {
            Some(d) => Ok(*d),
            None => self.default_domain(),
        }
    }

    pub fn push_domain(&mut self, d: ClockDomain) -> Result<()> {
        if self.graph.signal(d.clock).width != 1 {
            return Err(BuildError::Width {
                what: "clock",
                expected: 1,
                got: self.graph.signal(d.clock).width,
            });
        }
        self.domains.push(d);
        Ok(())
    }

    pub fn pop_domain(&mut self) -> Result<()> {
        self.domains
            .pop()
            .map(|_| ())
            .ok_or(BuildError::Unbalanced("pop_domain without push_domain"))
    }

    /// Runs `body` with `d` as the register domain.
    pub fn with_domain<T>(
        &mut self,
        d: ClockDomain,
        body: impl FnOnce(&mut Circuit) -> Result<T>,
    ) -> Result<T> {
        self.push_domain(d)?;
        let r = body(self);
        self.domains.pop();
        r
    }

    fn netlist_gate(
        &mut self,
        kind: NetlistKind,
        name: &str,
        ty: SignalType,
        init: Init,
        controls: &[(Signal, Option<Sense>)],
        delay: u32,
    ) -> Result<Signal> {
        let out = self.signal(name, ty.clone(), init)?;
        let signed = ty.is_signed();
        let g = self.graph.add_gate(
            GateKind::Netlist(Box::new(Netlist {
                kind,
                assigns: Vec::new(),
                signed,
            })),
            delay,
            self.location(),
        );
        let mut triggers = Vec::new();
        for (s, sense) in controls {
            let i = self.read_shared(g, *s)?;
            if let Some(sense) = sense {
                triggers.push(TriggerSpec { input: i, sense: *sense });
            }
        }
        self.graph.gate_mut(g).triggers = triggers;
        self.graph.connect(g, out.id, Direction::Write, ty)?;
        Ok(out)
    }

    /// Register in the current domain. `init` is also the reset value.
    pub fn reg(&mut self, name: &str, ty: SignalType, init: Init) -> Result<Signal> {
        let d = self.domain()?;
        let mut controls = vec![(Signal::new(d.clock), Some(Sense::Edge(d.edge)))];
        let reset = d.reset.map(|r| {
            controls.push((Signal::new(r.signal), r.asynchronous.then_some(Sense::Level)));
            ResetSpec {
                input: 1,
                active: r.active,
                asynchronous: r.asynchronous,
            }
        });
        let kind = NetlistKind::Reg {
            clock: 0,
            edge: d.edge,
            reset,
        };
        let delay = self.delays.reg;
        self.netlist_gate(kind, name, ty, init, &controls, delay)
    }

    /// `Reg(UInt[w](init))`.
    pub fn reg_uint(&mut self, name: &str, width: usize, init: u64) -> Result<Signal> {
        let v = Logic::try_from_u64(width, init)?;
        self.reg(name, SignalType::UInt(width), Init::Value(v))
    }

    /// Enum-typed register; resets to the first interned state.
    pub fn reg_enum(&mut self, name: &str, e: EnumId) -> Result<Signal> {
        self.reg(name, SignalType::Enum(e), Init::EnumState(0))
    }

    /// Level-sensitive latch, transparent while `enable` is 1.
    pub fn latch(&mut self, name: &str, ty: SignalType, init: Init, enable: Signal) -> Result<Signal> {
        let enable = self.truth(enable)?;
        let kind = NetlistKind::Latch {
            enable: 0,
            active: true,
        };
        let delay = self.delays.comb;
        self.netlist_gate(kind, name, ty, init, &[(enable, None)], delay)
    }

    /// Tri-state wire: carries `driver` while `enable` is 1, X otherwise.
    pub fn wtri(&mut self, name: &str, enable: Signal, driver: impl Into<Operand>) -> Result<Signal> {
        let enable = self.truth(enable)?;
        let driver = self.materialize(&driver.into(), None, None)?;
        let w = self.known_width(driver)?;
        let out = self.gate(GateKind::Tri, &[enable, driver], SignalType::UInt(w))?;
        if !name.is_empty() {
            self.name(out, name);
        }
        Ok(out)
    }

    /// Memory of `depth` words, each a register in the current domain.
    pub fn mem(&mut self, name: &str, width: usize, depth: usize) -> Result<Mem> {
        let words = (0..depth)
            .map(|i| self.reg(&format!("{name}_{i}"), SignalType::UInt(width), Init::Value(Logic::zeros(width))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mem { words, width })
    }

    /// Word at `addr`; X or out-of-range address reads X.
    pub fn mem_read(&mut self, mem: &Mem, addr: Signal) -> Result<Signal> {
        let mut inputs = vec![addr.unsigned()];
        inputs.extend(mem.words.iter().copied());
        self.gate(
            GateKind::MemRead {
                depth: mem.words.len(),
            },
            &inputs,
            SignalType::UInt(mem.width),
        )
    }

    /// Writes `value` to the word at `addr` under the current conditions.
    pub fn mem_write(&mut self, mem: &Mem, addr: Signal, value: impl Into<Operand>) -> Result<()> {
        let value = self.materialize(&value.into(), Some(mem.width), None)?;
        for (i, w) in mem.words.iter().enumerate() {
            let hit = self.eq(addr, i as i64)?;
            self.when_begin(hit)?;
            self.assign(*w, value)?;
            self.when_end()?;
        }
        Ok(())
    }
}
