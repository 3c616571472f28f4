//! Testbench tasks, stimulus helpers, a pass/fail ledger, and clocked
//! assertions.
//!
//! Tasks are `async` blocks driven by the session: a task runs until it
//! awaits a trigger (a delay, a signal edge, clock cycles, or other tasks)
//! and resumes after the simulation round in which the trigger fires.
//! Values a task sets land in the next round of the current slot.

pub mod pattern;

use crate::builder::{DefaultClock, Design};
use crate::ir::{EdgeKind, SignalId};
use crate::logic::{Bit, Logic};
use crate::sim::{SimError, Simulator, Stats, Strategy, Trace};
use pattern::{Pattern, PatternError, Samples, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::{Cell, RefCell};
use std::fmt::{self, Write as _};
use std::future::Future;
use std::pin::Pin;
use std::rc::Rc;
use std::task::{Context, Poll, Waker};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("signal {0} is driven by a gate")]
    MultipleDrivers(u32),
    #[error("task {0} joined twice")]
    JoinedTwice(usize),
    #[error("no task {0}")]
    NoTask(usize),
    #[error("design has no default clock")]
    NoClock,
    #[error("simulation ran out of events with {0} task(s) unfinished")]
    Stalled(usize),
    #[error("task `{task}` failed: {message}")]
    Task { task: String, message: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Which transitions of bit 0 count as an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSense {
    Pos,
    Neg,
    /// Any change of the value.
    Any,
}

impl From<EdgeKind> for EdgeSense {
    fn from(e: EdgeKind) -> EdgeSense {
        match e {
            EdgeKind::Pos => EdgeSense::Pos,
            EdgeKind::Neg => EdgeSense::Neg,
        }
    }
}

fn is_edge(sense: EdgeSense, old: &Logic, new: &Logic) -> bool {
    let (a, b) = (old.bit(0), new.bit(0));
    match sense {
        EdgeSense::Pos => matches!((a, b), (Bit::Zero, Bit::One) | (Bit::Zero, Bit::X) | (Bit::X, Bit::One)),
        EdgeSense::Neg => matches!((a, b), (Bit::One, Bit::Zero) | (Bit::One, Bit::X) | (Bit::X, Bit::Zero)),
        EdgeSense::Any => old != new,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub time: u64,
    pub source: String,
    pub passed: bool,
    pub message: String,
}

/// Collected check results. Failures never stop the simulation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    pub entries: Vec<Entry>,
    /// Assertion attempts still undecided when the run ended.
    pub unfinished: usize,
    /// Assertion attempts discarded by the disable condition.
    pub disabled: usize,
}

impl Ledger {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    /// Counts plus the first `max_failures` failures.
    pub fn report(&self, max_failures: usize) -> String {
        let mut s = String::new();
        writeln!(s, "checks={}", self.entries.len()).unwrap();
        writeln!(s, "passed={}", self.passed()).unwrap();
        writeln!(s, "failed={}", self.failed()).unwrap();
        writeln!(s, "unfinished={}", self.unfinished).unwrap();
        writeln!(s, "disabled={}", self.disabled).unwrap();
        for e in self.failures().take(max_failures) {
            writeln!(s, "FAIL t={} {}: {}", e.time, e.source, e.message).unwrap();
        }
        s
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let v = if e.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{} t={} {}: {}", v, e.time, e.source, e.message)?;
        }
        Ok(())
    }
}

/// Equality for checks: widths are aligned by zero extension, and X bits
/// must sit in the same positions on both sides.
pub fn check_equal(actual: &Logic, expected: &Logic) -> bool {
    let w = actual.width().max(expected.width());
    actual.resize(w, false) == expected.resize(w, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskId(pub usize);

#[derive(Debug, Clone)]
enum Wait {
    Time(u64),
    Edge { sig: SignalId, sense: EdgeSense, count: usize },
    Join(Vec<TaskId>),
}

struct Waiter {
    task: usize,
    wait: Wait,
    /// Round after which the waiter was registered; only later rounds fire it.
    after_round: u64,
    flag: Rc<Cell<bool>>,
}

struct AssertionState {
    name: String,
    trigger: (SignalId, Logic),
    disable: Option<(SignalId, Logic)>,
    props: Vec<(String, Pattern)>,
    samples: Samples,
    /// Values at the start of the current slot.
    preponed: Vec<Logic>,
    attempts: Vec<(usize, usize, u64)>,
}

type TaskFuture = Pin<Box<dyn Future<Output = Result<(), VerifyError>>>>;

struct Shared {
    sim: Simulator,
    driven: Vec<bool>,
    clock: Option<DefaultClock>,
    rng: ChaCha8Rng,
    ledger: Ledger,
    waiters: Vec<Waiter>,
    current: usize,
    names: Vec<String>,
    done: Vec<bool>,
    joined: Vec<bool>,
    /// Futures of tasks spawned since the session last collected them.
    spawned: Vec<TaskFuture>,
    rounds: u64,
    error: Option<VerifyError>,
}

impl Shared {
    fn register(&mut self, wait: Wait) -> Rc<Cell<bool>> {
        let flag = Rc::new(Cell::new(false));
        if let Wait::Time(t) = wait {
            if t > self.sim.time() {
                self.sim.add_wakeup(t);
            }
        }
        if let Wait::Edge { sig, .. } = wait {
            self.sim.watch(sig);
        }
        self.waiters.push(Waiter {
            task: self.current,
            wait,
            after_round: self.rounds,
            flag: flag.clone(),
        });
        flag
    }
}

/// Handle through which a task reads and drives the simulation.
#[derive(Clone)]
pub struct Tb {
    shared: Rc<RefCell<Shared>>,
}

/// Future returned by the trigger methods of [`Tb`].
pub struct Trigger {
    shared: Rc<RefCell<Shared>>,
    wait: Option<Wait>,
    flag: Option<Rc<Cell<bool>>>,
    error: Option<VerifyError>,
}

impl Future for Trigger {
    type Output = Result<(), VerifyError>;

    fn poll(mut self: Pin<&mut Self>, _: &mut Context<'_>) -> Poll<Self::Output> {
        if let Some(e) = self.error.take() {
            return Poll::Ready(Err(e));
        }
        if let Some(f) = &self.flag {
            return if f.get() { Poll::Ready(Ok(())) } else { Poll::Pending };
        }
        let wait = self.wait.take().expect("trigger polled after completion");
        let flag = self.shared.borrow_mut().register(wait);
        self.flag = Some(flag);
        Poll::Pending
    }
}

impl Tb {
    fn trigger(&self, wait: Wait) -> Trigger {
        Trigger {
            shared: self.shared.clone(),
            wait: Some(wait),
            flag: None,
            error: None,
        }
    }

    fn failed(&self, e: VerifyError) -> Trigger {
        Trigger {
            shared: self.shared.clone(),
            wait: None,
            flag: None,
            error: Some(e),
        }
    }

    pub fn now(&self) -> u64 {
        self.shared.borrow().sim.time()
    }

    pub fn getv(&self, s: impl Into<SignalId>) -> Logic {
        self.shared.borrow().sim.get(s.into())
    }

    /// Drives an undriven signal. The change is visible after the next
    /// round.
    pub fn setv(&self, s: impl Into<SignalId>, v: &Logic) -> Result<(), VerifyError> {
        let s = s.into();
        let mut sh = self.shared.borrow_mut();
        if sh.driven.get(s.index()).copied().unwrap_or(false) {
            return Err(VerifyError::MultipleDrivers(s.0));
        }
        sh.sim.set(s, v)?;
        Ok(())
    }

    /// `setv` with an integer value truncated to the signal width.
    pub fn setv_u64(&self, s: impl Into<SignalId>, v: u64) -> Result<(), VerifyError> {
        let s = s.into();
        let w = self.shared.borrow().sim.width(s);
        self.setv(s, &Logic::from_u64(w, v))
    }

    /// Drives each signal with a uniform binary value from the session
    /// generator and returns the values.
    pub fn setr(&self, signals: &[SignalId]) -> Result<Vec<Logic>, VerifyError> {
        let mut out = Vec::with_capacity(signals.len());
        for s in signals {
            let v = {
                let mut sh = self.shared.borrow_mut();
                let w = sh.sim.width(*s);
                random_logic(&mut sh.rng, w)
            };
            self.setv(*s, &v)?;
            out.push(v);
        }
        Ok(out)
    }

    /// Draws from the session generator.
    pub fn with_rng<T>(&self, f: impl FnOnce(&mut ChaCha8Rng) -> T) -> T {
        f(&mut self.shared.borrow_mut().rng)
    }

    /// Resumes `n` slots later; `delay(0)` resumes after the next round of
    /// the current slot.
    pub fn delay(&self, n: u64) -> Trigger {
        let t = self.now() + n;
        self.trigger(Wait::Time(t))
    }

    pub fn edge(&self, s: impl Into<SignalId>, sense: EdgeSense) -> Trigger {
        self.trigger(Wait::Edge {
            sig: s.into(),
            sense,
            count: 1,
        })
    }

    pub fn posedge(&self, s: impl Into<SignalId>) -> Trigger {
        self.edge(s, EdgeSense::Pos)
    }

    pub fn negedge(&self, s: impl Into<SignalId>) -> Trigger {
        self.edge(s, EdgeSense::Neg)
    }

    fn clock_edges(&self, sense: EdgeSense, n: usize) -> Trigger {
        match self.shared.borrow().clock {
            Some(c) => self.trigger(Wait::Edge {
                sig: c.clk,
                sense,
                count: n.max(1),
            }),
            None => self.failed(VerifyError::NoClock),
        }
    }

    /// `n` rising edges of the default clock.
    pub fn clock(&self, n: usize) -> Trigger {
        self.clock_edges(EdgeSense::Pos, n)
    }

    /// `n` falling edges of the default clock.
    pub fn clock_n(&self, n: usize) -> Trigger {
        self.clock_edges(EdgeSense::Neg, n)
    }

    /// Starts a child task.
    pub fn spawn<F, Fut>(&self, name: &str, f: F) -> TaskId
    where
        F: FnOnce(Tb) -> Fut,
        Fut: Future<Output = Result<(), VerifyError>> + 'static,
    {
        spawn_into(&self.shared, name, f)
    }

    /// Waits until every task in `tasks` has finished.
    pub fn join(&self, tasks: &[TaskId]) -> Trigger {
        let mut sh = self.shared.borrow_mut();
        for t in tasks {
            if t.0 >= sh.joined.len() {
                drop(sh);
                return self.failed(VerifyError::NoTask(t.0));
            }
            if sh.joined[t.0] {
                drop(sh);
                return self.failed(VerifyError::JoinedTwice(t.0));
            }
            sh.joined[t.0] = true;
        }
        drop(sh);
        self.trigger(Wait::Join(tasks.to_vec()))
    }

    /// Records a pass when `actual` equals `expected` (see [`check_equal`]).
    pub fn assert_eq(&self, actual: &Logic, expected: &Logic, what: &str) -> bool {
        let ok = check_equal(actual, expected);
        let message = if ok {
            format!("{what} == {expected}")
        } else {
            format!("{what}: got {actual}, expected {expected}")
        };
        self.record(ok, message);
        ok
    }

    pub fn check(&self, ok: bool, message: impl Into<String>) -> bool {
        self.record(ok, message.into());
        ok
    }

    fn record(&self, passed: bool, message: String) {
        let mut sh = self.shared.borrow_mut();
        let source = sh.names[sh.current].clone();
        let time = sh.sim.time();
        sh.ledger.entries.push(Entry {
            time,
            source,
            passed,
            message,
        });
    }
}

/// Uniform binary value of `width` bits.
pub fn random_logic(rng: &mut impl Rng, width: usize) -> Logic {
    let words: Vec<u64> = (0..width.div_ceil(64)).map(|_| rng.gen()).collect();
    let zeros = vec![0; words.len()];
    Logic::from_planes(width, &words, &zeros)
}


fn spawn_into<F, Fut>(shared: &Rc<RefCell<Shared>>, name: &str, f: F) -> TaskId
where
    F: FnOnce(Tb) -> Fut,
    Fut: Future<Output = Result<(), VerifyError>> + 'static,
{
    let fut = f(Tb { shared: shared.clone() });
    let mut sh = shared.borrow_mut();
    let id = sh.names.len();
    sh.names.push(name.to_string());
    sh.done.push(false);
    sh.joined.push(false);
    sh.spawned.push(Box::pin(fut));
    if !sh.sim.in_slot() {
        // make sure a slot runs to start the task
        let t = match sh.sim.peek_slot() {
            Some(t) => t,
            None if sh.rounds == 0 => 0,
            None => sh.sim.time() + 1,
        };
        sh.sim.add_wakeup(t);
    }
    TaskId(id)
}

/// Half period of the default clock driven by a [`Session`].
pub const CLOCK_HALF_PERIOD: u64 = 50;

/// Handle to an assertion created with [`Session::assertion`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssertionId(usize);

/// A simulator plus testbench tasks and assertions. Signals marked as
/// tracked in the design are recorded from the start.
pub struct Session {
    shared: Rc<RefCell<Shared>>,
    design: Design,
    tasks: Vec<Option<TaskFuture>>,
    assertions: Vec<AssertionState>,
    time_limit: u64,
}

impl Session {
    /// Session whose default clock (if the design has one) toggles every
    /// [`CLOCK_HALF_PERIOD`] slots.
    pub fn new(design: Design, strategy: Strategy, seed: u64) -> Result<Session, VerifyError> {
        let mut sim = Simulator::new(&design.graph, strategy)?;
        if let Some(c) = design.clock {
            sim.add_clock(c.clk, CLOCK_HALF_PERIOD);
        }
        for s in design.graph.signals() {
            if s.tracked {
                sim.record(s.id);
            }
        }
        let driven = design.graph.signals().iter().map(|s| s.writer.is_some()).collect();
        let shared = Shared {
            sim,
            driven,
            clock: design.clock,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ledger: Ledger::default(),
            waiters: Vec::new(),
            current: 0,
            names: Vec::new(),
            done: Vec::new(),
            joined: Vec::new(),
            spawned: Vec::new(),
            rounds: 0,
            error: None,
        };
        Ok(Session {
            shared: Rc::new(RefCell::new(shared)),
            design,
            tasks: Vec::new(),
            assertions: Vec::new(),
            time_limit: u64::MAX,
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    /// Last slot [`Session::join`] may run before giving up with
    /// [`VerifyError::Stalled`].
    pub fn set_time_limit(&mut self, t: u64) {
        self.time_limit = t;
    }

    pub fn time(&self) -> u64 {
        self.shared.borrow().sim.time()
    }

    pub fn get(&self, s: impl Into<SignalId>) -> Logic {
        self.shared.borrow().sim.get(s.into())
    }

    /// Direct access to the simulator between slots.
    pub fn with_sim<T>(&self, f: impl FnOnce(&mut Simulator) -> T) -> T {
        f(&mut self.shared.borrow_mut().sim)
    }

    pub fn stats(&self) -> Stats {
        self.shared.borrow().sim.stats().clone()
    }

    pub fn record(&self, s: impl Into<SignalId>) {
        self.shared.borrow_mut().sim.record(s.into());
    }

    pub fn trace(&self) -> Trace {
        self.shared.borrow().sim.trace().clone()
    }

    /// Waveform of the recorded signals under a root scope `top`.
    pub fn vcd(&self, top: &str) -> String {
        crate::emit::write_vcd(&self.design, self.shared.borrow().sim.trace(), top)
    }

    /// Check results so far; pending assertion attempts count as
    /// unfinished.
    pub fn ledger(&self) -> Ledger {
        let mut l = self.shared.borrow().ledger.clone();
        l.unfinished = self.assertions.iter().map(|a| a.attempts.len()).sum();
        l
    }

    pub fn spawn<F, Fut>(&mut self, name: &str, f: F) -> TaskId
    where
        F: FnOnce(Tb) -> Fut,
        Fut: Future<Output = Result<(), VerifyError>> + 'static,
    {
        spawn_into(&self.shared, name, f)
    }

    pub fn is_done(&self, t: TaskId) -> bool {
        self.shared.borrow().done.get(t.0).copied().unwrap_or(false)
    }

    /// Clocked assertion sampled whenever `trigger` changes to the given
    /// value. Attempts are discarded while the `disable` signal holds its
    /// value.
    pub fn assertion(
        &mut self,
        name: &str,
        trigger: (SignalId, Logic),
        disable: Option<(SignalId, Logic)>,
    ) -> AssertionId {
        let mut sh = self.shared.borrow_mut();
        sh.sim.watch(trigger.0);
        self.assertions.push(AssertionState {
            name: name.to_string(),
            trigger,
            disable,
            props: Vec::new(),
            samples: Samples::new(&[]),
            preponed: Vec::new(),
            attempts: Vec::new(),
        });
        AssertionId(self.assertions.len() - 1)
    }

    /// Assertion on the rising edge of the default clock, disabled while
    /// the reset is low.
    pub fn clocked_assertion(&mut self, name: &str) -> Result<AssertionId, VerifyError> {
        let c = self.design.clock.ok_or(VerifyError::NoClock)?;
        Ok(self.assertion(name, (c.clk, Logic::from_u64(1, 1)), Some((c.rst_n, Logic::from_u64(1, 0)))))
    }

    /// Adds a property to an assertion. A new attempt starts on every
    /// sample.
    pub fn check(&mut self, a: AssertionId, name: &str, p: Pattern) -> Result<(), VerifyError> {
        p.validate()?;
        let st = &mut self.assertions[a.0];
        st.props.push((name.to_string(), p));
        let mut sigs: Vec<SignalId> = Vec::new();
        for (_, p) in &st.props {
            p.signals(&mut sigs);
        }
        if let Some((d, _)) = &st.disable {
            sigs.push(*d);
        }
        sigs.sort();
        sigs.dedup();
        if sigs != st.samples.signals() {
            let old = std::mem::replace(&mut st.samples, Samples::new(&sigs));
            for step in 0..old.len() {
                let row = sigs
                    .iter()
                    .map(|s| {
                        if old.signals().contains(s) {
                            old.value(step, *s).expect("step in range").clone()
                        } else {
                            Logic::unknown(self.shared.borrow().sim.width(*s))
                        }
                    })
                    .collect();
                st.samples.push(row);
            }
        }
        Ok(())
    }

    /// Runs every slot up to and including `t_end`.
    pub fn run_until(&mut self, t_end: u64) -> Result<(), VerifyError> {
        while self.step(Some(t_end))?.is_some() {}
        self.shared.borrow_mut().sim.run_until(t_end)?;
        Ok(())
    }

    /// Runs until every task in `tasks` has finished.
    pub fn join(&mut self, tasks: &[TaskId]) -> Result<(), VerifyError> {
        {
            let sh = self.shared.borrow();
            if let Some(t) = tasks.iter().find(|t| t.0 >= sh.names.len()) {
                return Err(VerifyError::NoTask(t.0));
            }
        }
        loop {
            let open = tasks.iter().filter(|t| !self.is_done(**t)).count();
            if open == 0 {
                return Ok(());
            }
            if self.step(Some(self.time_limit))?.is_none() {
                return Err(VerifyError::Stalled(open));
            }
        }
    }

    /// Runs until every spawned task has finished.
    pub fn join_all(&mut self) -> Result<(), VerifyError> {
        let all: Vec<TaskId> = (0..self.shared.borrow().names.len()).map(TaskId).collect();
        self.join(&all)
    }

    /// Runs one slot with its rounds, task resumptions, and assertion
    /// samples. Returns the slot time, or `None` when no slot is due.
    pub fn step(&mut self, limit: Option<u64>) -> Result<Option<u64>, VerifyError> {
        let t = {
            let mut sh = self.shared.borrow_mut();
            let Some(t) = sh.sim.start_slot(limit) else { return Ok(None) };
            for a in &mut self.assertions {
                a.preponed = a.samples.signals().iter().map(|s| sh.sim.get(*s)).collect();
            }
            t
        };
        loop {
            {
                let mut sh = self.shared.borrow_mut();
                sh.sim.run_round()?;
                sh.rounds += 1;
            }
            self.sample_assertions();
            self.resume()?;
            let sh = self.shared.borrow();
            let delta = sh.waiters.iter().any(|w| matches!(w.wait, Wait::Time(at) if at <= t));
            if !sh.sim.round_pending() && !delta {
                break;
            }
        }
        self.shared.borrow_mut().sim.finish_slot();
        Ok(Some(t))
    }

    fn sample_assertions(&mut self) {
        let mut sh = self.shared.borrow_mut();
        let now = sh.sim.time();
        let Shared { sim, ledger, .. } = &mut *sh;
        for a in &mut self.assertions {
            let fired = sim
                .round_changes()
                .iter()
                .any(|(s, old)| *s == a.trigger.0 && *old != a.trigger.1 && sim.get(*s) == a.trigger.1);
            if !fired {
                continue;
            }
            a.samples.push(a.preponed.clone());
            let disabled = a
                .disable
                .as_ref()
                .is_some_and(|(s, v)| a.samples.value(a.samples.len() - 1, *s) == Some(v));
            if disabled {
                ledger.disabled += a.attempts.len();
                a.attempts.clear();
                continue;
            }
            let step = a.samples.len() - 1;
            for p in 0..a.props.len() {
                a.attempts.push((p, step, now));
            }
            let mut keep = Vec::with_capacity(a.attempts.len());
            for (p, start, at) in a.attempts.drain(..) {
                let (name, prop) = &a.props[p];
                match pattern::verdict(prop, &a.samples, start) {
                    Verdict::Pending => keep.push((p, start, at)),
                    v => ledger.entries.push(Entry {
                        time: now,
                        source: format!("{}.{}", a.name, name),
                        passed: v == Verdict::Pass,
                        message: format!("attempt from t={at}"),
                    }),
                }
            }
            a.attempts = keep;
        }
    }

    fn collect_spawned(&mut self, ready: &mut Vec<usize>) {
        let new = std::mem::take(&mut self.shared.borrow_mut().spawned);
        for f in new {
            ready.push(self.tasks.len());
            self.tasks.push(Some(f));
        }
    }

    /// Wakes tasks whose triggers fired in the last round and polls them in
    /// spawn order until no task is ready.
    fn resume(&mut self) -> Result<(), VerifyError> {
        let mut ready = Vec::new();
        self.collect_spawned(&mut ready);
        self.fire_waiters(true, &mut ready);
        while !ready.is_empty() {
            ready.sort_unstable();
            ready.dedup();
            for id in std::mem::take(&mut ready) {
                self.poll_task(id)?;
            }
            self.collect_spawned(&mut ready);
            self.fire_waiters(false, &mut ready);
        }
        Ok(())
    }

    fn fire_waiters(&mut self, after_round: bool, ready: &mut Vec<usize>) {
        let mut sh = self.shared.borrow_mut();
        let now = sh.sim.time();
        let rounds = sh.rounds;
        let Shared { sim, waiters, done, .. } = &mut *sh;
        let changes = sim.round_changes();
        waiters.retain_mut(|w| {
            let fresh = w.after_round < rounds;
            let fire = match &mut w.wait {
                Wait::Time(at) => after_round && fresh && *at <= now,
                Wait::Edge { sig, sense, count } => {
                    if after_round && fresh {
                        let hit = changes
                            .iter()
                            .any(|(s, old)| s == sig && is_edge(*sense, old, &sim.get(*s)));
                        if hit {
                            *count -= 1;
                        }
                    }
                    *count == 0
                }
                Wait::Join(ts) => ts.iter().all(|t| done[t.0]),
            };
            if fire {
                w.flag.set(true);
                ready.push(w.task);
            }
            !fire
        });
    }

    fn poll_task(&mut self, id: usize) -> Result<(), VerifyError> {
        let Some(fut) = self.tasks[id].as_mut() else { return Ok(()) };
        self.shared.borrow_mut().current = id;
        let mut cx = Context::from_waker(Waker::noop());
        match fut.as_mut().poll(&mut cx) {
            Poll::Pending => Ok(()),
            Poll::Ready(r) => {
                self.tasks[id] = None;
                let mut sh = self.shared.borrow_mut();
                sh.done[id] = true;
                match r {
                    Ok(()) => Ok(()),
                    Err(e) => {
                        let err = VerifyError::Task {
                            task: sh.names[id].clone(),
                            message: e.to_string(),
                        };
                        sh.error = Some(err.clone());
                        Err(err)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests;
