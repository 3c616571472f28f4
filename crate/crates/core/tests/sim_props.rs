use hgl::builder::{Circuit, Signal};
use hgl::designs::random_dag;
use hgl::logic::{Bit, CmpOp, Logic, ReduceKind};
use hgl::sim::{Simulator, Strategy, Trace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_values(w: usize) -> Vec<Logic> {
    (0..3usize.pow(w as u32))
        .map(|mut n| {
            let bits: Vec<Bit> = (0..w)
                .map(|_| {
                    let b = Bit::ALL[n % 3];
                    n /= 3;
                    b
                })
                .collect();
            Logic::from_bits_msb(&bits)
        })
        .collect()
}

type Build = fn(&mut Circuit, Signal, Signal) -> Signal;
type Reference = fn(&Logic, &Logic) -> Logic;

fn gates() -> Vec<(&'static str, Build, Reference)> {
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
        ("rxor", |c, a, _| c.reduce(ReduceKind::Xor, a).unwrap(), |a, _| a.reduce(ReduceKind::Xor)),
        ("cat", |c, a, b| c.cat(&[a.into(), b.into()]).unwrap(), |a, b| Logic::cat(&[a.clone(), b.clone()]).unwrap()),
        ("dyn_select", |c, a, b| c.dyn_select(a, b, 1).unwrap(), |a, b| a.dyn_select(b, 1)),
        (
            "mux",
            |c, a, b| {
                let s = c.bit(a, 0).unwrap();
                c.mux(s, a, b).unwrap()
            },
            |a, b| {
                let s = a.select(0, 1);
                match s.bit(0) {
                    Bit::One => b.clone(),
                    Bit::Zero => a.clone(),
                    Bit::X => a.merge(b).unwrap(),
                }
            },
        ),
    ]
}

/// Drives every input pair through a single gate, one pair per slot, and
/// checks the output, the X_count audit, and single execution per round.
fn exhaustive(name: &str, build: Build, reference: Reference, w: usize, strategy: Strategy) {
    let mut c = Circuit::new();
    let a = c.uint("a", w, 0).unwrap();
    let b = c.uint("b", w, 0).unwrap();
    let y = build(&mut c, a, b);
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, strategy).unwrap();
    sim.run_until(4).unwrap();
    let vals: Vec<Logic> = match strategy {
        Strategy::BinaryOnly => all_values(w).into_iter().filter(|v| !v.has_x()).collect(),
        _ => all_values(w),
    };
    let mut t = 10;
    for va in &vals {
        for vb in &vals {
            sim.schedule(t, a.id, va).unwrap();
            sim.schedule(t, b.id, vb).unwrap();
            sim.run_until(t + 2).unwrap();
            let want = reference(va, vb);
            if strategy != Strategy::BinaryOnly || !want.has_x() {
                assert_eq!(sim.get(y.id), want, "{name} {:?} ({va}, {vb})", strategy);
            }
            assert!(sim.audit().is_empty(), "{name} ({va}, {vb}): {:?}", sim.audit());
            t += 3;
        }
    }
    assert_eq!(sim.stats().multi_exec, 0, "{name}");
}

#[test]
fn single_gates_match_reference_exhaustively() {
    for (name, build, reference) in gates() {
        for w in 1..=4 {
            for s in Strategy::ALL {
                if w == 4 && s != Strategy::BinaryOnly && !matches!(name, "and" | "or" | "xor" | "not") {
                    continue;
                }
                exhaustive(name, build, reference, w, s);
            }
        }
    }
}

#[test]
fn binary_stimulus_makes_no_unknown_events() {
    for (name, build, _) in gates() {
        if matches!(name, "div" | "rem" | "dyn_select") {
            continue;
        }
        let mut c = Circuit::new();
        let a = c.uint("a", 3, 0).unwrap();
        let b = c.uint("b", 3, 0).unwrap();
        build(&mut c, a, b);
        let d = c.elaborate().unwrap();
        let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
        sim.run_until(4).unwrap();
        let base = sim.stats().clone();
        for n in 0..64u64 {
            sim.set(a.id, &Logic::from_u64(3, n & 7)).unwrap();
            sim.set(b.id, &Logic::from_u64(3, n >> 3)).unwrap();
            let t = sim.time() + 3;
            sim.run_until(t).unwrap();
        }
        let s = sim.stats();
        assert_eq!(s.comb_x_events, base.comb_x_events, "{name}");
        assert_eq!(s.full_execs, base.full_execs, "{name}");
        assert_eq!(s.x_updates, base.x_updates, "{name}");
    }
}

fn random_logic(rng: &mut ChaCha8Rng, w: usize, x_ratio: f64) -> Logic {
    let mut v = Logic::from_u64(w, rng.gen::<u64>());
    if rng.gen_bool(x_ratio) {
        let i = rng.gen_range(0..w);
        v.set_bit(i, Bit::X);
    }
    v
}

/// Trace, audit failures, and output values at the end of each period.
fn dag_trace(seed: u64, strategy: Strategy, x_ratio: f64) -> (Trace, Vec<String>, Vec<Vec<Logic>>) {
    let mut c = Circuit::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let io = random_dag(&mut c, &mut rng, 4, 40).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, strategy).unwrap();
    for s in io.inputs.iter().chain(&io.outputs) {
        sim.record(s.id);
    }
    let mut audits = Vec::new();
    let mut settled = Vec::new();
    for k in 0..30u64 {
        for s in &io.inputs {
            let v = random_logic(&mut rng, sim.width(s.id), x_ratio);
            sim.schedule(10 * k + 1, s.id, &v).unwrap();
        }
        sim.run_until(10 * k + 9).unwrap();
        audits.extend(sim.audit());
        settled.push(io.outputs.iter().map(|s| sim.get(s.id)).collect());
    }
    (sim.trace().clone(), audits, settled)
}

fn same(what: &str, a: &Trace, b: &Trace) -> Result<(), TestCaseError> {
    prop_assert_eq!(&a.signals, &b.signals);
    prop_assert_eq!(&a.initial, &b.initial);
    if let Some(k) = (0..a.changes.len().max(b.changes.len())).find(|k| a.changes.get(*k) != b.changes.get(*k)) {
        prop_assert!(false, "{} change {}: {:?} vs {:?}", what, k, a.changes.get(k), b.changes.get(k));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strategies_agree_on_random_dags(seed in any::<u64>(), x in 0.0f64..=1.0) {
        let (full, ..) = dag_trace(seed, Strategy::AlwaysFull, x);
        let (opt, audits, _) = dag_trace(seed, Strategy::Optimized, x);
        prop_assert!(audits.is_empty(), "{:?}", audits);
        same("optimized vs always_full", &opt, &full)?;
        // binary_only starts from zeros, so only settled values compare
        let (.., bin) = dag_trace(seed, Strategy::BinaryOnly, 0.0);
        let (.., opt0) = dag_trace(seed, Strategy::Optimized, 0.0);
        prop_assert_eq!(&bin[1..], &opt0[1..]);
    }
}

/// A random block of conditional assignments over 1-bit conditions `c*`,
/// a 2-bit switch subject and 4-bit data inputs.
#[derive(Debug, Clone)]
enum Stmt {
    Assign(usize, Src),
    Range(usize, usize, Src),
    When(Vec<(usize, Vec<Stmt>)>, Option<Vec<Stmt>>),
    Switch(Vec<(u64, Vec<Stmt>)>, Option<Vec<Stmt>>),
}

#[derive(Debug, Clone, Copy)]
enum Src {
    Const(u64),
    Data(usize),
}

const CONDS: usize = 3;
const TARGETS: usize = 2;

fn gen_block(rng: &mut ChaCha8Rng, depth: usize) -> Vec<Stmt> {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| gen_stmt(rng, depth)).collect()
}

fn gen_src(rng: &mut ChaCha8Rng) -> Src {
    if rng.gen_bool(0.5) {
        Src::Const(rng.gen_range(0..16))
    } else {
        Src::Data(rng.gen_range(0..2))
    }
}

fn gen_stmt(rng: &mut ChaCha8Rng, depth: usize) -> Stmt {
    let t = rng.gen_range(0..TARGETS);
    match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) } {
        0 => Stmt::Assign(t, gen_src(rng)),
        1 => Stmt::Range(t, rng.gen_range(0..3), gen_src(rng)),
        2 => {
            let arms = (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(0..CONDS), gen_block(rng, depth - 1))).collect();
            let other = rng.gen_bool(0.5).then(|| gen_block(rng, depth - 1));
            Stmt::When(arms, other)
        }
        _ => {
            let mut labels: Vec<u64> = (0..4).filter(|_| rng.gen_bool(0.6)).collect();
            if labels.is_empty() {
                labels.push(rng.gen_range(0..4));
            }
            let arms = labels.into_iter().map(|l| (l, gen_block(rng, depth - 1))).collect();
            let default = rng.gen_bool(0.5).then(|| gen_block(rng, depth - 1));
            Stmt::Switch(arms, default)
        }
    }
}

struct Env {
    conds: [bool; CONDS],
    subject: u64,
    data: [u64; 2],
}

fn src_value(s: Src, env: &Env) -> u64 {
    match s {
        Src::Const(v) => v,
        Src::Data(i) => env.data[i],
    }
}

fn interpret(block: &[Stmt], env: &Env, out: &mut [u64; TARGETS]) {
    for s in block {
        match s {
            Stmt::Assign(t, src) => out[*t] = src_value(*src, env),
            Stmt::Range(t, low, src) => {
                let m = 0b11 << low;
                out[*t] = (out[*t] & !m) | ((src_value(*src, env) & 0b11) << low);
            }
            Stmt::When(arms, other) => match arms.iter().find(|(c, _)| env.conds[*c]) {
                Some((_, body)) => interpret(body, env, out),
                None => {
                    if let Some(body) = other {
                        interpret(body, env, out);
                    }
                }
            },
            Stmt::Switch(arms, default) => match arms.iter().find(|(l, _)| *l == env.subject) {
                Some((_, body)) => interpret(body, env, out),
                None => {
                    if let Some(body) = default {
                        interpret(body, env, out);
                    }
                }
            },
        }
    }
}

struct Ports {
    conds: Vec<Signal>,
    subject: Signal,
    data: Vec<Signal>,
    targets: Vec<Signal>,
}

fn operand(c: &mut Circuit, p: &Ports, s: Src, count: usize) -> hgl::builder::Operand {
    match s {
        Src::Const(v) => Logic::from_u64(count, v & ((1 << count) - 1)).into(),
        Src::Data(i) if count == 4 => p.data[i].into(),
        Src::Data(i) => c.select(p.data[i], 0, count).unwrap().into(),
    }
}

fn build(c: &mut Circuit, p: &Ports, block: &[Stmt]) {
    for s in block {
        match s {
            Stmt::Assign(t, src) => {
                let v = operand(c, p, *src, 4);
                c.assign(p.targets[*t], v).unwrap();
            }
            Stmt::Range(t, low, src) => {
                let v = operand(c, p, *src, 2);
                c.assign_range(p.targets[*t], *low, 2, v).unwrap();
            }
            Stmt::When(arms, other) => {
                for (k, (cond, body)) in arms.iter().enumerate() {
                    if k == 0 {
                        c.when_begin(p.conds[*cond]).unwrap();
                    } else {
                        c.elsewhen(p.conds[*cond]).unwrap();
                    }
                    build(c, p, body);
                }
                if let Some(body) = other {
                    c.otherwise().unwrap();
                    build(c, p, body);
                }
                c.when_end().unwrap();
            }
            Stmt::Switch(arms, default) => {
                c.switch_begin(p.subject, false).unwrap();
                for (label, body) in arms {
                    c.case_begin(Logic::from_u64(2, *label)).unwrap();
                    build(c, p, body);
                }
                if let Some(body) = default {
                    c.case_default().unwrap();
                    build(c, p, body);
                }
                c.switch_end().unwrap();
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conditional_assignments_match_interpreter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut body = vec![Stmt::Assign(0, Src::Const(0)), Stmt::Assign(1, Src::Const(0))];
        body.extend(gen_block(&mut rng, 3));

        let mut c = Circuit::new();
        let p = Ports {
            conds: (0..CONDS).map(|i| c.uint(&format!("c{i}"), 1, 0).unwrap()).collect(),
            subject: c.uint("s", 2, 0).unwrap(),
            data: (0..2).map(|i| c.uint(&format!("d{i}"), 4, 0).unwrap()).collect(),
            targets: (0..TARGETS).map(|i| c.uint(&format!("t{i}"), 4, 0).unwrap()).collect(),
        };
        build(&mut c, &p, &body);
        let d = c.elaborate().unwrap();
        let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
        let mut t = 1;
        for _ in 0..40 {
            let env = Env {
                conds: [rng.gen(), rng.gen(), rng.gen()],
                subject: rng.gen_range(0..4),
                data: [rng.gen_range(0..16), rng.gen_range(0..16)],
            };
            for (i, s) in p.conds.iter().enumerate() {
                sim.schedule(t, s.id, &Logic::from_bool(env.conds[i])).unwrap();
            }
            sim.schedule(t, p.subject.id, &Logic::from_u64(2, env.subject)).unwrap();
            for (i, s) in p.data.iter().enumerate() {
                sim.schedule(t, s.id, &Logic::from_u64(4, env.data[i])).unwrap();
            }
            sim.run_until(t + 5).unwrap();
            let mut want = [0u64; TARGETS];
            interpret(&body, &env, &mut want);
            for (i, s) in p.targets.iter().enumerate() {
                prop_assert_eq!(sim.get(s.id), Logic::from_u64(4, want[i]), "target {} in {:?}", i, body);
            }
            t += 10;
        }
    }

    #[test]
    fn unknown_conditions_cover_every_resolution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut body = vec![Stmt::Assign(0, Src::Const(0)), Stmt::Assign(1, Src::Data(1))];
        body.extend(gen_block(&mut rng, 2));
        let mut c = Circuit::new();
        let p = Ports {
            conds: (0..CONDS).map(|i| c.uint(&format!("c{i}"), 1, 0).unwrap()).collect(),
            subject: c.uint("s", 2, 0).unwrap(),
            data: (0..2).map(|i| c.uint(&format!("d{i}"), 4, 0).unwrap()).collect(),
            targets: (0..TARGETS).map(|i| c.uint(&format!("t{i}"), 4, 0).unwrap()).collect(),
        };
        build(&mut c, &p, &body);
        let d = c.elaborate().unwrap();
        let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
        let xc = rng.gen_range(0..CONDS);
        let env_of = |b: bool| Env {
            conds: std::array::from_fn(|i| if i == xc { b } else { i % 2 == 0 }),
            subject: 2,
            data: [5, 9],
        };
        for (i, s) in p.conds.iter().enumerate() {
            let v = if i == xc { Logic::unknown(1) } else { Logic::from_bool(i % 2 == 0) };
            sim.schedule(1, s.id, &v).unwrap();
        }
        sim.schedule(1, p.subject.id, &Logic::from_u64(2, 2)).unwrap();
        sim.schedule(1, p.data[0].id, &Logic::from_u64(4, 5)).unwrap();
        sim.schedule(1, p.data[1].id, &Logic::from_u64(4, 9)).unwrap();
        sim.run_until(6).unwrap();
        for b in [false, true] {
            let mut want = [0u64; TARGETS];
            interpret(&body, &env_of(b), &mut want);
            for (i, s) in p.targets.iter().enumerate() {
                let got = sim.get(s.id);
                for k in 0..4 {
                    let bit = got.bit(k);
                    let exp = if want[i] >> k & 1 == 1 { Bit::One } else { Bit::Zero };
                    prop_assert!(bit == Bit::X || bit == exp, "target {} = {} vs {}", i, got, want[i]);
                }
            }
        }
    }
}
