//! Self-check suites. Each one returns a one-line detail on success or the
//! first discrepancy on failure.

use crate::bench::{self, BenchOpts, SWEEP};
use crate::examples::{self, build, vending_idle, vending_sequence, Example, Handles, RunOpts};
use crate::oracle::{self, all_values, ends, horizon, refinements, refines, traces, Coin};
use hgl::builder::{Circuit, Design, Signal};
use hgl::designs::random_dag;
use hgl::emit::{emit_verilog, write_vcd};
use hgl::ir::SignalId;
use hgl::logic::{Bit, CmpOp, Logic, ReduceKind};
use hgl::sim::{Simulator, Strategy};
use hgl::verify::pattern::{capture, eq_captured, fell, rose, seq, sig, verdict, wait, wait_range, Pattern, Samples, Verdict};
use hgl::verify::{Session, CLOCK_HALF_PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

pub type CheckResult = Result<String, String>;

/// Runs the CLI on an argument list and returns its standard output.
pub type Runner = dyn Fn(&[String]) -> Result<Vec<u8>, String>;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub result: CheckResult,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }

    pub fn line(&self) -> String {
        let (tag, detail) = match &self.result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        format!("{tag} {:>2} {} ({:.1}s): {detail}", self.id, self.name, self.elapsed.as_secs_f64())
    }
}

pub const NAMES: [&str; 10] = [
    "adder oracle equivalence",
    "waveform identity",
    "speedup",
    "binary-ratio trend",
    "x-count soundness",
    "vending machine",
    "three-state semantics",
    "assertion engine",
    "emission",
    "determinism",
];

/// Whether the check depends on wall-clock measurements.
pub fn is_timing(id: u32) -> bool {
    matches!(id, 3 | 4)
}

/// Runs check `id` (1 to 10). Determinism runs `cli` for each argument
/// list and compares what it produced.
pub fn run(id: u32, cli: &Runner) -> Outcome {
    let start = Instant::now();
    let result = match id {
        1 => adder_oracle(),
        2 => waveform_identity(),
        3 => speedup(),
        4 => ratio_trend(),
        5 => soundness(),
        6 => vending_exhaustive(),
        7 => three_state(),
        8 => assertions(),
        9 => emission(),
        10 => determinism(cli),
        _ => Err(format!("no check {id}")),
    };
    Outcome {
        id,
        name: NAMES[id as usize - 1],
        result,
        elapsed: start.elapsed(),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn adder_oracle() -> CheckResult {
    let mut checks = 0;
    for ex in [Example::Ripple, Example::Koggestone] {
        for w in [4, 8, 32] {
            let opts = RunOpts {
                example: ex,
                cycles: 1000,
                seed: w as u64,
                strategy: Strategy::Optimized,
                params: vec![("w".into(), w)],
            };
            let out = examples::run(&opts).map_err(|e| e.to_string())?;
            let l = &out.ledger;
            ensure(l.failed() == 0 && l.passed() == 1000, || format!("{ex} w={w}: {}", l.report(3)))?;
            checks += l.passed();
        }
    }
    Ok(format!("{checks} sums exact over ripple/koggestone at w=4,8,32"))
}

fn vcd_pair(f: impl Fn(Strategy) -> Result<String, String>) -> Result<usize, String> {
    let a = f(Strategy::Optimized)?;
    let b = f(Strategy::AlwaysFull)?;
    if a != b {
        let line = a.lines().zip(b.lines()).position(|(x, y)| x != y).unwrap_or(0);
        return Err(format!("VCDs differ at line {}", line + 1));
    }
    Ok(a.len())
}

/// Random DAG driven with vectors that carry X bits with probability
/// `x_ratio`; returns its VCD.
pub fn dag_vcd(seed: u64, gates: usize, vectors: usize, x_ratio: f64, strategy: Strategy) -> Result<String, String> {
    let mut c = Circuit::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let io = random_dag(&mut c, &mut rng, 4, gates).map_err(|e| e.to_string())?;
    let all: Vec<Signal> = io.inputs.iter().chain(&io.outputs).copied().collect();
    c.track(&all);
    let d = c.elaborate().map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(&d.graph, strategy).map_err(|e| e.to_string())?;
    for k in 0..vectors as u64 {
        for s in &io.inputs {
            let w = sim.width(s.id);
            let mut v = Logic::from_u64(w, rng.gen());
            for i in 0..w {
                if rng.gen_bool(x_ratio / w as f64) {
                    v.set_bit(i, Bit::X);
                }
            }
            // inputs change at different slots so glitches show up
            sim.schedule(20 * k + 1 + rng.gen_range(0..3), s.id, &v).map_err(|e| e.to_string())?;
        }
        sim.run_until(20 * k + 19).map_err(|e| e.to_string())?;
    }
    Ok(write_vcd(&d, sim.trace(), "top"))
}

/// Wallace multiplier with every tracked signal dumped, one stimulus per
/// clock cycle.
pub fn wallace_vcd(width: usize, stim: &[(Logic, Logic)], strategy: Strategy) -> Result<String, String> {
    let (d, io) = bench::wallace(width).map_err(|e| e.to_string())?;
    let err = |e: hgl::sim::SimError| e.to_string();
    let mut sim = Simulator::new(&d.graph, strategy).map_err(err)?;
    let clk = d.clock.expect("clock").clk;
    sim.add_clock(clk, CLOCK_HALF_PERIOD);
    let period = 2 * CLOCK_HALF_PERIOD;
    for (i, (a, b)) in stim.iter().enumerate() {
        let t = period * (i as u64 + 1);
        sim.schedule(t, io.a.id, a).map_err(err)?;
        sim.schedule(t, io.b.id, b).map_err(err)?;
    }
    sim.run_until(period * (stim.len() as u64 + 1)).map_err(err)?;
    Ok(write_vcd(&d, sim.trace(), "top"))
}

pub fn waveform_identity() -> CheckResult {
    let mut bytes = 0;
    for seed in 0..200 {
        bytes += vcd_pair(|s| {
            let opts = RunOpts {
                example: Example::Vending,
                cycles: 24,
                seed,
                strategy: s,
                params: vec![],
            };
            let out = examples::run(&opts).map_err(|e| e.to_string())?;
            ensure(out.ledger.failed() == 0, || out.ledger.report(3))?;
            Ok(out.vcd)
        })
        .map_err(|e| format!("vending seed {seed}: {e}"))?;
    }
    let stim = bench::stimuli(32, 1000, 0.1, 11);
    bytes += vcd_pair(|s| wallace_vcd(32, &stim, s)).map_err(|e| format!("wallace-32: {e}"))?;
    for seed in 0..100 {
        bytes += vcd_pair(|s| dag_vcd(seed, 50, 40, 0.3, s)).map_err(|e| format!("dag seed {seed}: {e}"))?;
    }
    Ok(format!("vending x200, wallace-32 at x=0.1 x1000, dag-50 x100 identical ({} KiB compared)", bytes / 1024))
}

fn bench_rows(x_ratios: Vec<f64>, strategies: Vec<Strategy>, n: usize, repeat: usize) -> Result<Vec<bench::BenchRow>, String> {
    let opts = BenchOpts {
        width: 32,
        n_stimuli: n,
        x_ratios,
        strategies,
        seed: 3,
        repeat,
    };
    bench::run(&opts).map_err(|e| e.to_string())
}

pub fn speedup() -> CheckResult {
    let rows = bench_rows(vec![0.0], Strategy::ALL.to_vec(), 25, 60)?;
    let cps = |s: Strategy| rows.iter().find(|r| r.strategy == s).expect("row").cps();
    let (opt, full, bin) = (cps(Strategy::Optimized), cps(Strategy::AlwaysFull), cps(Strategy::BinaryOnly));
    let detail = format!(
        "cps optimized={opt:.0} always_full={full:.0} binary_only={bin:.0}; optimized is {:.2}x always_full, {:.2}x binary_only",
        opt / full,
        opt / bin
    );
    ensure(opt >= 2.0 * full && opt >= 0.8 * bin, || detail.clone())?;
    Ok(detail)
}

pub fn ratio_trend() -> CheckResult {
    let rows = bench_rows(SWEEP.to_vec(), vec![Strategy::Optimized, Strategy::AlwaysFull], 40, 20)?;
    let per = |s: Strategy| -> Vec<f64> { rows.iter().filter(|r| r.strategy == s).map(|r| r.ns_per_exec()).collect() };
    let (opt, full) = (per(Strategy::Optimized), per(Strategy::AlwaysFull));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
    let spread = full.iter().cloned().fold(f64::MIN, f64::max) / full.iter().cloned().fold(f64::MAX, f64::min);
    let detail = format!(
        "ns/exec at binary ratio 0..1: optimized [{}], always_full [{}] (spread {:.1}%)",
        fmt(&opt),
        fmt(&full),
        100.0 * (spread - 1.0)
    );
    let monotone = opt.windows(2).all(|p| p[1] <= 1.05 * p[0]);
    ensure(monotone && spread <= 1.15, || detail.clone())?;
    Ok(detail)
}

type Build = fn(&mut Circuit, Signal, Signal) -> Signal;
type Reference = fn(&Logic, &Logic) -> Logic;

/// Single-gate circuits with their reference functions.
pub fn gate_table() -> Vec<(&'static str, Build, Reference)> {
    vec![
        ("and", |c, a, b| c.and(a, b).unwrap(), |a, b| a.and(b).unwrap()),
        ("or", |c, a, b| c.or(a, b).unwrap(), |a, b| a.or(b).unwrap()),
        ("xor", |c, a, b| c.xor(a, b).unwrap(), |a, b| a.xor(b).unwrap()),
        ("not", |c, a, _| c.not(a).unwrap(), |a, _| a.not()),
        ("add", |c, a, b| c.add(a, b).unwrap(), |a, b| a.add(b, false).unwrap()),
        ("sub", |c, a, b| c.sub(a, b).unwrap(), |a, b| a.sub(b, false).unwrap()),
        ("mul", |c, a, b| c.mul(a, b).unwrap(), |a, b| a.mul(b, false).unwrap()),
        ("div", |c, a, b| c.div(a, b).unwrap(), |a, b| a.divmod(b).unwrap().0),
        ("rem", |c, a, b| c.rem(a, b).unwrap(), |a, b| a.divmod(b).unwrap().1),
        ("lt", |c, a, b| c.cmp(CmpOp::Lt, a, b).unwrap(), |a, b| a.cmp(CmpOp::Lt, b, false).unwrap()),
        ("eq", |c, a, b| c.eq(a, b).unwrap(), |a, b| a.cmp(CmpOp::Eq, b, false).unwrap()),
        ("rand", |c, a, _| c.reduce(ReduceKind::And, a).unwrap(), |a, _| a.reduce(ReduceKind::And)),
        ("rxor", |c, a, _| c.reduce(ReduceKind::Xor, a).unwrap(), |a, _| a.reduce(ReduceKind::Xor)),
        ("cat", |c, a, b| c.cat(&[a.into(), b.into()]).unwrap(), |a, b| Logic::cat(&[a.clone(), b.clone()]).unwrap()),
        ("select", |c, a, _| c.select(a, 0, 1).unwrap(), |a, _| a.select(0, 1)),
        ("dyn_select", |c, a, b| c.dyn_select(a, b, 1).unwrap(), |a, b| a.dyn_select(b, 1)),
    ]
}

/// Applies every input pair, one pair per slot, auditing X counts after
/// every slot. Returns the number of slots audited.
fn gate_exhaustive(name: &str, build: Build, reference: Reference, w: usize, strategy: Strategy) -> Result<usize, String> {
    let mut c = Circuit::new();
    let a = c.uint("a", w, 0).map_err(|e| e.to_string())?;
    let b = c.uint("b", w, 0).map_err(|e| e.to_string())?;
    let y = build(&mut c, a, b);
    let d = c.elaborate().map_err(|e| e.to_string())?;
    let mut sim = Simulator::new(&d.graph, strategy).map_err(|e| e.to_string())?;
    let vals: Vec<Logic> = all_values(w)
        .into_iter()
        .filter(|v| strategy != Strategy::BinaryOnly || !v.has_x())
        .collect();
    let mut t = 2;
    let mut slots = 0;
    for va in &vals {
        for vb in &vals {
            sim.schedule(t, a.id, va).map_err(|e| e.to_string())?;
            sim.schedule(t, b.id, vb).map_err(|e| e.to_string())?;
            while sim.step_slot(Some(t + 2)).map_err(|e| e.to_string())?.is_some() {
                slots += 1;
                let bad = sim.audit();
                ensure(bad.is_empty(), || format!("{name} w={w} {}: {}", strategy.name(), bad[0]))?;
            }
            let want = reference(va, vb);
            if strategy != Strategy::BinaryOnly || !want.has_x() {
                let got = sim.get(y.id);
                ensure(got == want, || format!("{name}({va}, {vb}) = {got} under {}, want {want}", strategy.name()))?;
            }
            t += 3;
        }
    }
    ensure(sim.stats().multi_exec == 0, || format!("{name}: a gate ran twice in one round"))?;
    Ok(slots)
}

/// Unknown-plane traffic and full executions caused by binary stimuli
/// after the initial settle.
fn binary_traffic(d: &Design, inputs: &[SignalId], cycles: u64, seed: u64) -> Result<(u64, u64, u64), String> {
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).map_err(|e| e.to_string())?;
    sim.run_until(199).map_err(|e| e.to_string())?;
    sim.reset_stats();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 1..=cycles {
        for s in inputs {
            let v = hgl::verify::random_logic(&mut rng, sim.width(*s));
            sim.schedule(200 * k, *s, &v).map_err(|e| e.to_string())?;
        }
        while sim.step_slot(Some(200 * k + 199)).map_err(|e| e.to_string())?.is_some() {
            let bad = sim.audit();
            ensure(bad.is_empty(), || bad[0].clone())?;
        }
    }
    let s = sim.stats();
    Ok((s.comb_x_events, s.full_execs, s.multi_exec))
}

pub fn soundness() -> CheckResult {
    let mut slots = 0;
    let mut tables = 0;
    for (name, b, r) in gate_table() {
        for w in 1..=4 {
            for s in Strategy::ALL {
                slots += gate_exhaustive(name, b, r, w, s)?;
                tables += 1;
            }
        }
    }
    let (d, io) = bench::wallace(8).map_err(|e| e.to_string())?;
    let (x, full, multi) = binary_traffic(&d, &[io.a.id, io.b.id], 200, 1)?;
    ensure(x == 0 && multi == 0, || format!("wallace-8: {x} unknown-plane events, {multi} repeated executions"))?;
    // registers are always evaluated with the full function
    let regs = 2 * 8;
    ensure(full <= 200 * regs as u64 * 2, || format!("wallace-8: {full} full executions"))?;
    for seed in 0..50 {
        let mut c = Circuit::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(&mut c, &mut rng, 4, 50).map_err(|e| e.to_string())?;
        let d = c.elaborate().map_err(|e| e.to_string())?;
        let ins: Vec<SignalId> = dag.inputs.iter().map(|s| s.id).collect();
        let (x, _, multi) = binary_traffic(&d, &ins, 20, seed)?;
        ensure(x == 0 && multi == 0, || format!("dag {seed}: {x} unknown-plane events, {multi} repeated executions"))?;
    }
    Ok(format!(
        "{tables} exhaustive gate tables, {slots} audited slots; no unknown-plane events under binary stimuli"
    ))
}

pub fn vending_exhaustive() -> CheckResult {
    let built = build(Example::Vending, &[]).map_err(|e| e.to_string())?;
    let Handles::Vending(io) = built.handles else { unreachable!() };
    let idle = vending_idle(&built.design);
    let rst_n = built.design.clock.expect("clock").rst_n;
    let mut sequences = 0;
    let mut checks = 0;
    for len in 1..=6u32 {
        for code in 0..3usize.pow(len) {
            let coins: Vec<Coin> = (0..len).map(|k| Coin::ALL[code / 3usize.pow(k) % 3]).collect();
            let mut sess = Session::new(built.design.clone(), Strategy::Optimized, 0).map_err(|e| e.to_string())?;
            let idle = idle.clone();
            let seq = coins.clone();
            // one idle cycle after the sequence so a final `valid` is seen
            let t = sess.spawn("seq", move |tb| async move {
                tb.setv_u64(rst_n, 0)?;
                tb.clock_n(1).await?;
                tb.setv_u64(rst_n, 1)?;
                let mut all = seq;
                all.push(Coin::None);
                vending_sequence(&tb, io, &idle, &all).await
            });
            sess.join(&[t]).map_err(|e| e.to_string())?;
            let l = sess.ledger();
            ensure(l.failed() == 0, || format!("{coins:?}: {}", l.report(2)))?;
            sequences += 1;
            checks += l.passed();
        }
    }
    Ok(format!("{sequences} coin sequences of length <= 6, {checks} checks"))
}

type Unary = fn(&Logic) -> Logic;
type Binary = fn(&Logic, &Logic) -> Logic;

fn unary_ops() -> Vec<(&'static str, Unary)> {
    vec![
        ("not", |a| a.not()),
        ("rand", |a| a.reduce(ReduceKind::And)),
        ("ror", |a| a.reduce(ReduceKind::Or)),
        ("rxor", |a| a.reduce(ReduceKind::Xor)),
        ("zext", |a| a.resize(a.width() + 2, false)),
        ("sext", |a| a.resize(a.width() + 2, true)),
        ("select", |a| a.select(1, 3)),
    ]
}

fn binary_ops() -> Vec<(&'static str, Binary)> {
    vec![
        ("and", |a, b| a.and(b).unwrap()),
        ("or", |a, b| a.or(b).unwrap()),
        ("xor", |a, b| a.xor(b).unwrap()),
        ("add", |a, b| a.add(b, false).unwrap()),
        ("sub", |a, b| a.sub(b, true).unwrap()),
        ("mul", |a, b| a.mul(b, false).unwrap()),
        ("div", |a, b| a.divmod(b).unwrap().0),
        ("rem", |a, b| a.divmod(b).unwrap().1),
        ("lt", |a, b| a.cmp(CmpOp::Lt, b, false).unwrap()),
        ("ges", |a, b| a.cmp(CmpOp::Ge, b, true).unwrap()),
        ("eq", |a, b| a.cmp(CmpOp::Eq, b, false).unwrap()),
        ("cat", |a, b| Logic::cat(&[a.clone(), b.clone()]).unwrap()),
        ("dyn_select", |a, b| a.dyn_select(b, 2)),
        ("insert", |a, b| a.insert(b, &a.select(0, 1))),
    ]
}

pub fn three_state() -> CheckResult {
    for w in [1, 3, 4, 63, 64, 65, 200] {
        let a = Logic::ones(w);
        let (q, r) = a.divmod(&Logic::zeros(w)).unwrap();
        ensure(q.is_all_x() && r.is_all_x(), || format!("{w}-bit division by zero: {q}, {r}"))?;
        ensure(a.select(w, 2).is_all_x(), || format!("{w}-bit select past the top"))?;
        ensure(a.dyn_select(&Logic::from_u64(16, w as u64), 1).is_all_x(), || format!("{w}-bit dynamic select past the top"))?;
    }
    let mut cases = 0u64;
    for w in 1..=4 {
        let vals = all_values(w);
        for a in &vals {
            let n = a.not();
            for i in 0..w {
                ensure(n.bit(i) == oracle::kleene_not(a.bit(i)), || format!("~{a} = {n}"))?;
            }
            for b in &vals {
                let (and, or, xor) = (a.and(b).unwrap(), a.or(b).unwrap(), a.xor(b).unwrap());
                for i in 0..w {
                    let (x, y) = (a.bit(i), b.bit(i));
                    ensure(and.bit(i) == oracle::kleene_and(x, y), || format!("{a} & {b} = {and}"))?;
                    ensure(or.bit(i) == oracle::kleene_or(x, y), || format!("{a} | {b} = {or}"))?;
                    ensure(xor.bit(i) == oracle::kleene_xor(x, y), || format!("{a} ^ {b} = {xor}"))?;
                }
                cases += 1;
            }
        }
        for (name, f) in unary_ops() {
            for a in &vals {
                let coarse = f(a);
                for ra in refinements(a) {
                    let fine = f(&ra);
                    ensure(refines(&fine, &coarse), || format!("{name}({a}) = {coarse} but {name}({ra}) = {fine}"))?;
                    cases += 1;
                }
            }
        }
        for (name, f) in binary_ops() {
            for a in &vals {
                for b in &vals {
                    let coarse = f(a, b);
                    for ra in refinements(a) {
                        for rb in refinements(b) {
                            let fine = f(&ra, &rb);
                            ensure(refines(&fine, &coarse), || {
                                format!("{name}({a}, {b}) = {coarse} but {name}({ra}, {rb}) = {fine}")
                            })?;
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{cases} truth-table and refinement cases at widths 1..=4"))
}

const EN: SignalId = SignalId(0);

fn one_bit(t: &[bool]) -> Samples {
    let mut s = Samples::new(&[EN]);
    for b in t {
        s.push(vec![Logic::from_bool(*b)]);
    }
    s
}

/// "en falls one cycle after it rises".
pub fn p1(en: SignalId) -> Pattern {
    rose(en).implies(wait(1) >> fell(en))
}

/// "two writes, then a read, to the same address".
pub fn p2(en: SignalId, w: SignalId, addr: SignalId) -> Pattern {
    let write = || rose(en) & sig(w);
    (write() & capture("addr", addr)).implies(seq([
        wait(2) >> (write() & eq_captured(addr, "addr")),
        wait(2) >> (rose(en) & !sig(w) & eq_captured(addr, "addr")),
    ]))
}

/// (en, w, addr) per step.
type Rows = Vec<(u64, u64, u64)>;

fn p2_cases() -> Vec<(&'static str, Rows, usize, Verdict)> {
    let good = vec![(0, 0, 0), (1, 1, 5), (0, 0, 0), (1, 1, 5), (0, 0, 0), (1, 0, 5)];
    let mut other_addr = good.clone();
    other_addr[3].2 = 6;
    let mut read_addr = good.clone();
    read_addr[5].2 = 4;
    let mut third_write = good.clone();
    third_write[5].1 = 1;
    let mut held = good.clone();
    held[2] = (1, 1, 5);
    vec![
        ("write write read", good.clone(), 1, Verdict::Pass),
        ("second write elsewhere", other_addr, 1, Verdict::Fail),
        ("read elsewhere", read_addr, 1, Verdict::Fail),
        ("write instead of read", third_write, 1, Verdict::Fail),
        ("en held high", held, 1, Verdict::Fail),
        ("no rise", good.clone(), 0, Verdict::Pass),
        ("rise is a read", vec![(0, 0, 0), (1, 0, 5), (0, 0, 0)], 1, Verdict::Pass),
        ("cut short", good[..4].to_vec(), 1, Verdict::Pending),
    ]
}

/// Drives 0 and then `trace` on `en` before successive rising edges and returns the
/// ledger counts of `p1` checked by a clocked assertion.
fn p1_on_simulator(trace: &[bool]) -> Result<(usize, usize), String> {
    let mut c = Circuit::new();
    c.default_clock().map_err(|e| e.to_string())?;
    let en = c.uint("en", 1, 0).map_err(|e| e.to_string())?;
    let d = c.elaborate().map_err(|e| e.to_string())?;
    let mut sess = Session::new(d, Strategy::Optimized, 0).map_err(|e| e.to_string())?;
    let a = sess.clocked_assertion("a").map_err(|e| e.to_string())?;
    sess.check(a, "p1", p1(en.id)).map_err(|e| e.to_string())?;
    let values: Vec<bool> = std::iter::once(false).chain(trace.iter().copied()).collect();
    let t = sess.spawn("drive", move |tb| async move {
        for v in values {
            tb.setv_u64(en, u64::from(v))?;
            tb.clock(1).await?;
        }
        Ok(())
    });
    sess.join(&[t]).map_err(|e| e.to_string())?;
    let l = sess.ledger();
    Ok((l.passed(), l.failed()))
}

pub fn assertions() -> CheckResult {
    let pp1 = p1(EN);
    let mut checked = 0u64;
    for len in 1..=12 {
        for t in traces(len) {
            let s = one_bit(&t);
            for i in 0..len {
                let rise = i > 0 && !t[i - 1] && t[i];
                let want = match (rise, t.get(i + 1)) {
                    (false, _) => Verdict::Pass,
                    (true, None) => Verdict::Pending,
                    (true, Some(next)) if !next => Verdict::Pass,
                    (true, Some(_)) => Verdict::Fail,
                };
                let got = verdict(&pp1, &s, i);
                ensure(got == want, || format!("p1 from {i} on {t:?}: {got:?}, want {want:?}"))?;
                checked += 1;
            }
        }
    }
    let (en, w, addr) = (SignalId(0), SignalId(1), SignalId(2));
    let pp2 = p2(en, w, addr);
    for (name, rows, start, want) in p2_cases() {
        let mut s = Samples::new(&[en, w, addr]);
        for (e, wr, a) in rows {
            s.push(vec![Logic::from_u64(1, e), Logic::from_u64(1, wr), Logic::from_u64(4, a)]);
        }
        let got = verdict(&pp2, &s, start);
        ensure(got == want, || format!("p2 {name}: {got:?}, want {want:?}"))?;
        checked += 1;
    }
    let parts = [
        sig(EN),
        !sig(EN),
        rose(EN),
        fell(EN),
        wait(1) >> sig(EN),
        sig(EN).repeat(2),
        rose(EN) >> wait(2) >> fell(EN),
        wait_range(1, 2) >> !sig(EN),
    ];
    for a in &parts {
        for b in &parts {
            let p = a.clone().implies(b.clone());
            let h = horizon(&p);
            for len in 1..=12 {
                for t in traces(len) {
                    let s = one_bit(&t);
                    for start in (0..len).filter(|i| i + h < len) {
                        let ea = ends(a, EN, &t, start);
                        let ok = ea.is_empty() || ea.iter().any(|e| !ends(b, EN, &t, *e).is_empty());
                        let want = if ok { Verdict::Pass } else { Verdict::Fail };
                        let got = verdict(&p, &s, start);
                        ensure(got == want, || format!("{p:?} from {start} on {t:?}: {got:?}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    for t in traces(6) {
        // each rising edge samples the value driven before it
        let mut sampled = vec![false];
        sampled.extend(&t);
        let (mut pass, mut fail) = (0, 0);
        for i in 0..sampled.len() {
            match verdict(&pp1, &one_bit(&sampled), i) {
                Verdict::Pass => pass += 1,
                Verdict::Fail => fail += 1,
                Verdict::Pending => {}
            }
        }
        let got = p1_on_simulator(&t)?;
        ensure(got == (pass, fail), || format!("simulated p1 on {t:?}: {got:?}, want {:?}", (pass, fail)))?;
        checked += 1;
    }
    Ok(format!("{checked} verdicts match the oracles"))
}

pub const GOLDEN: [(Example, &str, &str); 3] = [
    (Example::Fulladder, "full_adder", include_str!("../../core/tests/golden/full_adder.sv")),
    (Example::Ripple, "ripple_carry8", include_str!("../../core/tests/golden/ripple_carry8.sv")),
    (Example::Vending, "vending", include_str!("../../core/tests/golden/vending.sv")),
];

/// Verilog for an example as `emit` writes it. The ripple golden uses
/// `w=8`.
pub fn golden_text(example: Example) -> Result<String, String> {
    let params = match example {
        Example::Ripple => vec![("w".to_string(), 8)],
        _ => vec![],
    };
    let d = examples::design_only(example, &params).map_err(|e| e.to_string())?;
    Ok(emit_verilog(&d, "top").map_err(|e| format!("{e:?}"))?.render())
}

pub fn emission() -> CheckResult {
    for (ex, name, want) in GOLDEN {
        let got = golden_text(ex)?;
        if got != want {
            let line = got.lines().zip(want.lines()).position(|(a, b)| a != b).unwrap_or(0);
            return Err(format!("{name}.sv differs from its golden at line {}", line + 1));
        }
    }
    let mut units = 0;
    for ex in Example::ALL {
        let b = build(ex, &[]).map_err(|e| e.to_string())?;
        let v = emit_verilog(&b.design, "top").map_err(|e| format!("{e:?}"))?;
        let lint = v.lint();
        ensure(lint.is_empty(), || format!("{ex}: {}", lint[0]))?;
        units += v.units.len();
    }
    for seed in 0..20 {
        let mut c = Circuit::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_dag(&mut c, &mut rng, 4, 50).map_err(|e| e.to_string())?;
        let d = c.elaborate().map_err(|e| e.to_string())?;
        let lint = emit_verilog(&d, "top").map_err(|e| format!("{e:?}"))?.lint();
        ensure(lint.is_empty(), || format!("dag {seed}: {}", lint[0]))?;
    }
    Ok(format!("3 goldens match; lint clean on {units} modules of the examples and 20 random DAGs"))
}

/// Command lines whose outputs must repeat byte for byte. Paths are
/// relative to the directory given.
pub fn determinism_commands(dir: &str, tag: &str) -> Vec<Vec<String>> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<String>>();
    vec![
        s(&["run", "vending", "--cycles", "200", "--seed", "7", "--vcd", &format!("{dir}/vending_{tag}.vcd"), "--ledger", &format!("{dir}/vending_{tag}.txt")]),
        s(&["run", "ripple", "--seed", "1", "--vcd", &format!("{dir}/ripple_{tag}.vcd")]),
        s(&["run", "koggestone", "--param", "w=64", "--cycles", "50", "--seed", "3", "--strategy", "always_full"]),
        s(&["run", "wallace", "--param", "w=8", "--cycles", "30", "--vcd", &format!("{dir}/wallace_{tag}.vcd")]),
        s(&["bench", "--width", "8", "--n-stimuli", "100", "--x-ratio", "0.3", "--seed", "5"]),
        s(&["bench", "--width", "8", "--n-stimuli", "50", "--x-ratio", "sweep", "--strategies", "optimized,always_full"]),
    ]
}

fn determinism(cli: &Runner) -> CheckResult {
    let dir = std::env::temp_dir().join(format!("hgl-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let d = dir.to_string_lossy().to_string();
    let collect = |tag: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let mut out = Vec::new();
        for cmd in determinism_commands(&d, tag) {
            let stdout = cli(&cmd)?;
            let text = String::from_utf8_lossy(&stdout);
            let kept = if cmd[0] == "bench" { bench::without_timings(&text) } else { text.to_string() };
            let mark = format!("_{tag}.");
            out.push((cmd.join(" ").replace(&mark, "_*."), kept.into_bytes()));
            for p in cmd.iter().filter(|a| a.starts_with(&d)) {
                out.push((p.replace(&mark, "_*."), std::fs::read(p).map_err(|e| format!("{p}: {e}"))?));
            }
        }
        Ok(out)
    };
    let a = collect("a")?;
    let b = collect("b")?;
    let _ = std::fs::remove_dir_all(&dir);
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        ensure(x == y, || format!("`{name}` differs between runs"))?;
    }
    Ok(format!("{} outputs identical across repeated runs", a.len()))
}
