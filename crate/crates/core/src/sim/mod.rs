//! Event-driven three-state simulator with selective X propagation.
//!
//! Each gate has two functions: a three-state function over both planes and
//! a binary function over the value plane. The binary function runs while a
//! gate has no X input and none of its unknown planes changed in the round.
//!
//! A slot is processed in rounds. Each round applies the pending events
//! (update phase) and then runs every triggered gate once (execute phase).
//! Outputs of zero-delay gates land in the next round of the same slot;
//! other outputs land in slot `t + delay`.

mod eval;

pub use eval::resolve_assignments;

use crate::ir::{GateKind, Graph, Init, NetlistKind, SignalId};
use crate::logic::{word_count, Bit, Logic};
use eval::{Ctx, FastOp};
use smallvec::SmallVec;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Gate function selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Binary function unless a gate sees X inputs or unknown-plane changes.
    Optimized,
    /// Three-state function everywhere.
    AlwaysFull,
    /// Binary function everywhere. Wrong once any X appears.
    BinaryOnly,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Optimized, Strategy::AlwaysFull, Strategy::BinaryOnly];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Optimized => "optimized",
            Strategy::AlwaysFull => "always_full",
            Strategy::BinaryOnly => "binary_only",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Strategy, String> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("event for slot {at} scheduled at slot {now}")]
    Past { at: u64, now: u64 },
    #[error("no convergence after {rounds} rounds in slot {time}")]
    DeltaLimit { time: u64, rounds: u64 },
    #[error("signal {signal} has width {expected}, value has width {got}")]
    Width { signal: u32, expected: usize, got: usize },
    #[error("signal {0} has an unresolved enum initial value")]
    Unresolved(u32),
    #[error("signal {0} does not exist")]
    NoSignal(u32),
    #[error("no slot is in progress")]
    NotInSlot,
}

/// Counters collected during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub slots: u64,
    pub rounds: u64,
    /// Events taken from the queue.
    pub events: u64,
    /// Events that changed a value plane.
    pub v_updates: u64,
    /// Events that changed an unknown plane.
    pub x_updates: u64,
    pub fast_execs: u64,
    pub full_execs: u64,
    /// Unknown-plane events scheduled after initialization by gates that are
    /// not always-full.
    pub comb_x_events: u64,
    /// Plane-type tests in the update phase (one per event).
    pub plane_checks: u64,
    /// Counter tests in the execute phase (one per selectable execution).
    pub gate_checks: u64,
    /// Executions of a gate already executed in the same round.
    pub multi_exec: u64,
}

impl Stats {
    pub fn gate_execs(&self) -> u64 {
        self.fast_execs + self.full_execs
    }

    pub fn pairs(&self) -> [(&'static str, u64); 11] {
        [
            ("slots", self.slots),
            ("rounds", self.rounds),
            ("events", self.events),
            ("v_updates", self.v_updates),
            ("x_updates", self.x_updates),
            ("fast_execs", self.fast_execs),
            ("full_execs", self.full_execs),
            ("comb_x_events", self.comb_x_events),
            ("plane_checks", self.plane_checks),
            ("gate_checks", self.gate_checks),
            ("multi_exec", self.multi_exec),
        ]
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.pairs() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Recorded waveform of the tracked signals. Only the value at the end of
/// each slot is recorded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub signals: Vec<SignalId>,
    pub initial: Vec<Logic>,
    pub changes: Vec<(u64, SignalId, Logic)>,
}

#[derive(Debug, Clone)]
struct Event {
    sig: u32,
    x: bool,
    data: SmallVec<[u64; 1]>,
}

#[derive(Debug, Clone, Copy)]
struct SigInfo {
    off: u32,
    words: u32,
    width: u32,
}

struct CGate {
    kind: GateKind,
    in_start: u32,
    in_len: u32,
    out: Option<u32>,
    out_width: u32,
    delay: u32,
    full: bool,
    fast: FastOp,
    netlist: bool,
    init: Logic,
    init_v: u64,
}

struct Clock {
    sig: u32,
    half: u64,
    next: u64,
    value: bool,
}

const DELTA_LIMIT: u64 = 100_000;

pub struct Simulator {
    strategy: Strategy,
    sigs: Vec<SigInfo>,
    vp: Vec<u64>,
    xp: Vec<u64>,
    zeros: Vec<u64>,
    gates: Vec<CGate>,
    in_sig: Vec<u32>,
    in_width: Vec<u32>,
    fan_start: Vec<u32>,
    fan: Vec<(u32, bool)>,
    xcount: Vec<u32>,
    xchanged: Vec<bool>,
    waiting: Vec<bool>,
    prev_clock: Vec<Bit>,
    last_round: Vec<u64>,
    gt: Vec<u32>,
    // scheduling
    time: u64,
    in_slot: bool,
    done: bool,
    init_pending: bool,
    slot_rounds: u64,
    round_id: u64,
    queue: BTreeMap<u64, Vec<Event>>,
    stage_t: u64,
    stage: Vec<Event>,
    cur: Vec<Event>,
    spare: Vec<Event>,
    clocks: Vec<Clock>,
    wakeups: BTreeSet<u64>,
    // observation
    tracked: Vec<bool>,
    dirty_flag: Vec<bool>,
    dirty: Vec<u32>,
    last_rec: Vec<Option<Logic>>,
    trace: Trace,
    watched: Vec<bool>,
    watch_round: Vec<u64>,
    round_changes: Vec<(SignalId, Logic)>,
    stats: Stats,
}

impl Simulator {
    /// Compiles `graph` for simulation. Signals start at their initial
    /// values; gates are first executed in slot 0.
    pub fn new(graph: &Graph, strategy: Strategy) -> Result<Simulator, SimError> {
        let mut sigs = Vec::with_capacity(graph.signals().len());
        let mut vp = Vec::new();
        let mut xp = Vec::new();
        let mut max_words = 1;
        for s in graph.signals() {
            if matches!(s.init, Init::EnumState(_)) || s.width == 0 {
                return Err(SimError::Unresolved(s.id.0));
            }
            let init = s.init_value();
            let n = word_count(s.width);
            max_words = max_words.max(n);
            sigs.push(SigInfo {
                off: vp.len() as u32,
                words: n as u32,
                width: s.width as u32,
            });
            vp.extend_from_slice(init.value_plane());
            xp.extend_from_slice(init.unknown_plane());
        }

        if strategy == Strategy::BinaryOnly {
            // no unknown plane at all: unknown initial values start as 0
            for (v, x) in vp.iter_mut().zip(xp.iter_mut()) {
                *v &= !*x;
                *x = 0;
            }
        }

        let mut gates = Vec::with_capacity(graph.gates().len());
        let mut in_sig = Vec::new();
        let mut in_width = Vec::new();
        let mut fan_lists: Vec<Vec<(u32, bool)>> = vec![Vec::new(); sigs.len()];
        for g in graph.gates() {
            let start = in_sig.len() as u32;
            let mut narrow = true;
            for (i, e) in g.inputs.iter().enumerate() {
                let w = sigs[e.signal.index()].width;
                narrow &= w <= 64;
                in_sig.push(e.signal.0);
                in_width.push(w);
                fan_lists[e.signal.index()].push((g.id.0, g.is_sensitive(i)));
            }
            let out = g.outputs.first().map(|e| e.signal.0);
            let out_width = out.map_or(1, |o| sigs[o as usize].width);
            narrow &= out_width <= 64;
            let init = match out {
                Some(o) => graph.signal(SignalId(o)).init_value(),
                None => Logic::zeros(1),
            };
            let init_v = init.value_plane()[0];
            gates.push(CGate {
                fast: FastOp::of(&g.kind, narrow),
                netlist: matches!(g.kind, GateKind::Netlist(_)),
                kind: g.kind.clone(),
                in_start: start,
                in_len: g.inputs.len() as u32,
                out,
                out_width,
                delay: g.delay,
                full: g.always_full_sim,
                init,
                init_v,
            });
        }
        let mut fan_start = Vec::with_capacity(sigs.len() + 1);
        let mut fan = Vec::new();
        for l in fan_lists {
            fan_start.push(fan.len() as u32);
            fan.extend(l);
        }
        fan_start.push(fan.len() as u32);

        let n = gates.len();
        let mut sim = Simulator {
            strategy,
            zeros: vec![0; max_words],
            xcount: vec![0; n],
            xchanged: vec![false; n],
            waiting: vec![false; n],
            prev_clock: vec![Bit::X; n],
            last_round: vec![0; n],
            gt: Vec::with_capacity(n),
            time: 0,
            in_slot: false,
            done: false,
            init_pending: true,
            slot_rounds: 0,
            round_id: 0,
            queue: BTreeMap::new(),
            stage_t: 0,
            stage: Vec::new(),
            cur: Vec::new(),
            spare: Vec::new(),
            clocks: Vec::new(),
            wakeups: BTreeSet::new(),
            tracked: vec![false; sigs.len()],
            dirty_flag: vec![false; sigs.len()],
            dirty: Vec::new(),
            last_rec: vec![None; sigs.len()],
            trace: Trace::default(),
            watched: vec![false; sigs.len()],
            watch_round: vec![0; sigs.len()],
            round_changes: Vec::new(),
            stats: Stats::default(),
            sigs,
            vp,
            xp,
            gates,
            in_sig,
            in_width,
            fan_start,
            fan,
        };
        for g in 0..n {
            let gate = &graph.gates()[g];
            sim.xcount[g] = gate
                .inputs
                .iter()
                .filter(|e| sim.has_x(e.signal.0))
                .count() as u32;
            if let GateKind::Netlist(nl) = &gate.kind {
                if let NetlistKind::Reg { clock, .. } = nl.kind {
                    sim.prev_clock[g] = sim.get(gate.inputs[clock].signal).bit(0);
                }
            }
        }
        for s in graph.signals() {
            if s.tracked {
                sim.record(s.id);
            }
        }
        Ok(sim)
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = Stats::default();
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Current slot, or the last finished one between slots.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn in_slot(&self) -> bool {
        self.in_slot
    }

    fn has_x(&self, sig: u32) -> bool {
        let s = self.sigs[sig as usize];
        self.xp[s.off as usize..(s.off + s.words) as usize]
            .iter()
            .any(|w| *w != 0)
    }

    fn info(&self, sig: SignalId) -> Result<SigInfo, SimError> {
        self.sigs.get(sig.index()).copied().ok_or(SimError::NoSignal(sig.0))
    }

    pub fn width(&self, sig: SignalId) -> usize {
        self.sigs[sig.index()].width as usize
    }

    /// Current value of `sig`.
    pub fn get(&self, sig: SignalId) -> Logic {
        let s = self.sigs[sig.index()];
        let r = s.off as usize..(s.off + s.words) as usize;
        Logic::from_planes(s.width as usize, &self.vp[r.clone()], &self.xp[r])
    }

    /// Drives `sig` to `value`. Inside a slot the change lands in the next
    /// round; between slots it lands in the next slot to run.
    pub fn set(&mut self, sig: SignalId, value: &Logic) -> Result<(), SimError> {
        let t = if self.in_slot || !self.done { self.time } else { self.time + 1 };
        self.schedule(t, sig, value)
    }

    /// Schedules `sig` to take `value` at slot `at`.
    pub fn schedule(&mut self, at: u64, sig: SignalId, value: &Logic) -> Result<(), SimError> {
        let info = self.info(sig)?;
        if value.width() != info.width as usize {
            return Err(SimError::Width {
                signal: sig.0,
                expected: info.width as usize,
                got: value.width(),
            });
        }
        if at < self.time || (at == self.time && self.done && !self.in_slot) {
            return Err(SimError::Past { at, now: self.time });
        }
        for (x, plane) in [(false, value.value_plane()), (true, value.unknown_plane())] {
            let ev = Event {
                sig: sig.0,
                x,
                data: SmallVec::from_slice(plane),
            };
            if at == self.time && self.in_slot {
                self.cur.push(ev);
            } else {
                self.enqueue(at, ev);
            }
        }
        Ok(())
    }

    fn enqueue(&mut self, at: u64, ev: Event) {
        if at != self.stage_t {
            if !self.stage.is_empty() {
                let spill = std::mem::take(&mut self.stage);
                self.queue.entry(self.stage_t).or_default().extend(spill);
            }
            self.stage_t = at;
        }
        self.stage.push(ev);
    }

    /// Toggles `sig` every `half` slots, first at slot `half`.
    pub fn add_clock(&mut self, sig: SignalId, half: u64) {
        assert!(half > 0, "clock half period must be positive");
        let value = self.get(sig).bit(0) == Bit::One;
        self.clocks.push(Clock {
            sig: sig.0,
            half,
            next: self.time + half,
            value,
        });
    }

    /// Requests that slot `t` runs even if no event is due.
    pub fn add_wakeup(&mut self, t: u64) {
        self.wakeups.insert(t);
    }

    /// Records end-of-slot changes of `sig` in the trace.
    pub fn record(&mut self, sig: SignalId) {
        if !self.tracked[sig.index()] {
            self.tracked[sig.index()] = true;
            let v = self.get(sig);
            self.trace.signals.push(sig);
            self.trace.initial.push(v.clone());
            self.last_rec[sig.index()] = Some(v);
        }
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Reports the pre-round value of `sig` whenever a round changes it.
    pub fn watch(&mut self, sig: SignalId) {
        self.watched[sig.index()] = true;
    }

    /// Watched signals changed by the last round, with their old values.
    pub fn round_changes(&self) -> &[(SignalId, Logic)] {
        &self.round_changes
    }

    fn next_time(&self) -> Option<u64> {
        let mut t = self.queue.keys().next().copied();
        if !self.stage.is_empty() {
            t = Some(t.map_or(self.stage_t, |q| q.min(self.stage_t)));
        }
        for c in &self.clocks {
            t = Some(t.map_or(c.next, |q| q.min(c.next)));
        }
        if let Some(w) = self.wakeups.iter().next() {
            t = Some(t.map_or(*w, |q| q.min(*w)));
        }
        if self.init_pending {
            t = Some(0);
        }
        t
    }

    /// Time of the next slot that has work, if any.
    pub fn peek_slot(&self) -> Option<u64> {
        self.next_time()
    }

    /// Opens the next slot with work, unless it lies beyond `limit`.
    pub fn start_slot(&mut self, limit: Option<u64>) -> Option<u64> {
        assert!(!self.in_slot, "slot already in progress");
        let t = self.next_time()?;
        if limit.is_some_and(|l| t > l) {
            return None;
        }
        self.time = t;
        self.in_slot = true;
        self.done = false;
        self.slot_rounds = 0;
        self.stats.slots += 1;
        self.wakeups.remove(&t);
        let mut events = Vec::new();
        for c in &mut self.clocks {
            if c.next == t {
                c.value = !c.value;
                c.next += c.half;
                events.push(Event {
                    sig: c.sig,
                    x: false,
                    data: SmallVec::from_slice(&[c.value as u64]),
                });
                events.push(Event {
                    sig: c.sig,
                    x: true,
                    data: SmallVec::from_slice(&[0]),
                });
            }
        }
        if let Some(q) = self.queue.remove(&t) {
            events.extend(q);
        }
        if self.stage_t == t {
            events.append(&mut self.stage);
        }
        events.append(&mut self.cur);
        self.cur = events;
        Some(t)
    }

    /// Whether the open slot has events for another round.
    pub fn round_pending(&self) -> bool {
        !self.cur.is_empty() || self.init_pending
    }

    /// One update phase followed by one execute phase.
    pub fn run_round(&mut self) -> Result<(), SimError> {
        if !self.in_slot {
            return Err(SimError::NotInSlot);
        }
        self.slot_rounds += 1;
        if self.slot_rounds > DELTA_LIMIT {
            return Err(SimError::DeltaLimit {
                time: self.time,
                rounds: self.slot_rounds,
            });
        }
        self.round_id += 1;
        self.stats.rounds += 1;
        self.round_changes.clear();
        let mut events = std::mem::replace(&mut self.cur, std::mem::take(&mut self.spare));
        self.gt.clear();
        for ev in &events {
            self.apply(ev);
        }
        events.clear();
        self.spare = events;

        let init = self.init_pending;
        if init {
            self.init_pending = false;
            for g in 0..self.gates.len() {
                self.xchanged[g] = true;
                if !self.waiting[g] {
                    self.waiting[g] = true;
                    self.gt.push(g as u32);
                }
            }
        }
        let gt = std::mem::take(&mut self.gt);
        for &g in &gt {
            let g = g as usize;
            if self.waiting[g] {
                self.execute(g, init);
                self.waiting[g] = false;
            }
        }
        self.gt = gt;
        Ok(())
    }

    #[inline]
    fn apply(&mut self, ev: &Event) {
        self.stats.events += 1;
        self.stats.plane_checks += 1;
        let s = self.sigs[ev.sig as usize];
        let r = s.off as usize..(s.off + s.words) as usize;
        let plane = if ev.x { &mut self.xp[r] } else { &mut self.vp[r] };
        if plane == &ev.data[..] {
            return;
        }
        let sig = ev.sig as usize;
        if self.watched[sig] && self.watch_round[sig] != self.round_id {
            self.watch_round[sig] = self.round_id;
            let old = self.get(SignalId(ev.sig));
            self.round_changes.push((SignalId(ev.sig), old));
        }
        let plane = if ev.x {
            &mut self.xp[s.off as usize..(s.off + s.words) as usize]
        } else {
            &mut self.vp[s.off as usize..(s.off + s.words) as usize]
        };
        let was_x = ev.x && plane.iter().any(|w| *w != 0);
        plane.copy_from_slice(&ev.data);
        if self.tracked[sig] && !self.dirty_flag[sig] {
            self.dirty_flag[sig] = true;
            self.dirty.push(ev.sig);
        }
        let fans = self.fan_start[sig] as usize..self.fan_start[sig + 1] as usize;
        if ev.x {
            self.stats.x_updates += 1;
            let is_x = ev.data.iter().any(|w| *w != 0);
            for i in fans {
                let (g, sensitive) = self.fan[i];
                let g = g as usize;
                match (was_x, is_x) {
                    (false, true) => self.xcount[g] += 1,
                    (true, false) => self.xcount[g] -= 1,
                    _ => {}
                }
                self.xchanged[g] = true;
                if sensitive && !self.waiting[g] {
                    self.waiting[g] = true;
                    self.gt.push(g as u32);
                }
            }
        } else {
            self.stats.v_updates += 1;
            for i in fans {
                let (g, sensitive) = self.fan[i];
                if sensitive && !self.waiting[g as usize] {
                    self.waiting[g as usize] = true;
                    self.gt.push(g);
                }
            }
        }
    }

    fn execute(&mut self, g: usize, init: bool) {
        if self.last_round[g] == self.round_id {
            self.stats.multi_exec += 1;
        }
        self.last_round[g] = self.round_id;
        let use_full = match self.strategy {
            Strategy::AlwaysFull => true,
            Strategy::BinaryOnly => false,
            Strategy::Optimized => {
                self.gates[g].full || {
                    self.stats.gate_checks += 1;
                    self.xcount[g] > 0 || self.xchanged[g]
                }
            }
        };
        if use_full {
            self.xchanged[g] = false;
            self.stats.full_execs += 1;
            self.exec_full(g, init);
        } else {
            self.stats.fast_execs += 1;
            self.exec_fast(g);
        }
    }

    fn input_logic(&self, sig: u32, with_x: bool) -> Logic {
        let s = self.sigs[sig as usize];
        let r = s.off as usize..(s.off + s.words) as usize;
        let x = if with_x { &self.xp[r.clone()] } else { &self.zeros[..s.words as usize] };
        Logic::from_planes(s.width as usize, &self.vp[r], x)
    }

    fn eval_logic(&mut self, g: usize, with_x: bool) -> Logic {
        let cg = &self.gates[g];
        let r = cg.in_start as usize..(cg.in_start + cg.in_len) as usize;
        let ins: SmallVec<[Logic; 4]> = self.in_sig[r].iter().map(|s| self.input_logic(*s, with_x)).collect();
        let hold = match (cg.netlist, cg.out) {
            (true, Some(o)) => self.input_logic(o, with_x),
            _ => cg.init.clone(),
        };
        let ctx = Ctx {
            hold: &hold,
            init: &cg.init,
            prev_clock: &mut self.prev_clock[g],
        };
        eval::full(&cg.kind, &ins, cg.out_width as usize, ctx)
    }

    fn exec_full(&mut self, g: usize, init: bool) {
        let out = self.eval_logic(g, true);
        let cg = &self.gates[g];
        let Some(sig) = cg.out else { return };
        let delay = cg.delay;
        if !init && !cg.full {
            self.stats.comb_x_events += 1;
        }
        self.emit(delay, sig, false, out.value_plane());
        self.emit(delay, sig, true, out.unknown_plane());
    }

    fn exec_fast(&mut self, g: usize) {
        let cg = &self.gates[g];
        let Some(sig) = cg.out else { return };
        let delay = cg.delay;
        if cg.fast == FastOp::Generic {
            let out = self.eval_logic(g, false);
            self.emit(delay, sig, false, out.value_plane());
            return;
        }
        let r = cg.in_start as usize..(cg.in_start + cg.in_len) as usize;
        let mut buf: SmallVec<[u64; 8]> = SmallVec::with_capacity(r.len());
        for s in &self.in_sig[r.clone()] {
            buf.push(self.vp[self.sigs[*s as usize].off as usize]);
        }
        let v = eval::fast(&cg.fast, &cg.kind, &buf, &self.in_width[r], cg.out_width, cg.init_v);
        self.emit(delay, sig, false, &[v]);
    }

    #[inline]
    fn emit(&mut self, delay: u32, sig: u32, x: bool, plane: &[u64]) {
        let ev = Event {
            sig,
            x,
            data: SmallVec::from_slice(plane),
        };
        if delay == 0 {
            self.cur.push(ev);
        } else {
            let at = self.time + delay as u64;
            self.enqueue(at, ev);
        }
    }

    /// Closes the open slot and records tracked changes.
    pub fn finish_slot(&mut self) {
        assert!(self.in_slot, "no slot in progress");
        for s in std::mem::take(&mut self.dirty) {
            self.dirty_flag[s as usize] = false;
            let v = self.get(SignalId(s));
            if self.last_rec[s as usize].as_ref() != Some(&v) {
                self.trace.changes.push((self.time, SignalId(s), v.clone()));
                self.last_rec[s as usize] = Some(v);
            }
        }
        self.in_slot = false;
        self.done = true;
    }

    /// Runs the next slot with work to completion. Returns its time.
    pub fn step_slot(&mut self, limit: Option<u64>) -> Result<Option<u64>, SimError> {
        let Some(t) = self.start_slot(limit) else { return Ok(None) };
        loop {
            self.run_round()?;
            if !self.round_pending() {
                break;
            }
        }
        self.finish_slot();
        Ok(Some(t))
    }

    /// Runs every slot up to and including `t_end`; returns the number of
    /// slots run. Afterwards the simulator sits at the end of `t_end`.
    pub fn run_until(&mut self, t_end: u64) -> Result<u64, SimError> {
        let mut n = 0;
        while self.step_slot(Some(t_end))?.is_some() {
            n += 1;
        }
        if t_end >= self.time {
            self.time = t_end;
            self.done = true;
        }
        Ok(n)
    }

    /// X_count consistency: every gate that may take the binary path must
    /// count exactly its input edges with a non-zero unknown plane.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (g, cg) in self.gates.iter().enumerate() {
            if cg.full {
                continue;
            }
            let r = cg.in_start as usize..(cg.in_start + cg.in_len) as usize;
            let expect = self.in_sig[r].iter().filter(|s| self.has_x(**s)).count() as u32;
            if self.xcount[g] != expect {
                out.push(format!("gate {g}: X_count {} but {expect} X inputs", self.xcount[g]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests;
