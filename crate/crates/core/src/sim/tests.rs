use super::*;
use crate::builder::{Circuit, Design, Signal};
use crate::logic::lit;

fn and_chain(n: usize) -> (Design, Signal, Signal, Signal) {
    let mut c = Circuit::new();
    let a = c.uint("a", 4, 0).unwrap();
    let b = c.uint("b", 4, 0).unwrap();
    let mut s = c.and(a, b).unwrap();
    for _ in 1..n {
        s = c.and(s, b).unwrap();
    }
    c.name(s, "y");
    (c.elaborate().unwrap(), a, b, s)
}

fn settle(sim: &mut Simulator) {
    let t = sim.time() + 20;
    sim.run_until(t).unwrap();
}

#[test]
fn binary_stimulus_stays_on_fast_path() {
    let (d, a, b, y) = and_chain(4);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    settle(&mut sim);
    let init_full = sim.stats().full_execs;
    let init_x = sim.stats().x_updates;
    let init_comb_x = sim.stats().comb_x_events;
    for (va, vb) in [(0xF, 0x3), (0x5, 0xF), (0xA, 0xE)] {
        sim.set(a.id, &Logic::from_u64(4, va)).unwrap();
        sim.set(b.id, &Logic::from_u64(4, vb)).unwrap();
        settle(&mut sim);
        assert_eq!(sim.get(y.id), Logic::from_u64(4, va & vb));
        assert!(sim.audit().is_empty());
    }
    assert_eq!(sim.stats().full_execs, init_full);
    assert_eq!(sim.stats().comb_x_events, init_comb_x);
    assert_eq!(sim.stats().x_updates, init_x);
    assert_eq!(sim.stats().multi_exec, 0);
}

#[test]
fn x_then_zero_runs_full_once_on_return() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 1).unwrap();
    let b = c.uint("b", 1, 1).unwrap();
    let y = c.and(a, b).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    settle(&mut sim);
    let base = sim.stats().clone();

    sim.set(a.id, &lit("1'bx")).unwrap();
    settle(&mut sim);
    assert_eq!(sim.get(y.id), lit("1'bx"));
    assert_eq!(sim.stats().full_execs - base.full_execs, 1);

    // the return slot still sees X_changed
    sim.set(a.id, &lit("1'b0")).unwrap();
    settle(&mut sim);
    assert_eq!(sim.get(y.id), lit("1'b0"));
    assert_eq!(sim.stats().full_execs - base.full_execs, 2);

    sim.set(a.id, &lit("1'b1")).unwrap();
    settle(&mut sim);
    assert_eq!(sim.get(y.id), lit("1'b1"));
    assert_eq!(sim.stats().full_execs - base.full_execs, 2);
    assert_eq!(sim.stats().fast_execs - base.fast_execs, 1);
    assert!(sim.audit().is_empty());
}

#[test]
fn same_slot_events_apply_in_order() {
    let (d, a, _, _) = and_chain(1);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.schedule(3, a.id, &lit("4'd1")).unwrap();
    sim.schedule(3, a.id, &lit("4'd2")).unwrap();
    sim.run_until(3).unwrap();
    assert_eq!(sim.get(a.id), lit("4'd2"));
}

#[test]
fn unchanged_value_triggers_nothing() {
    let (d, a, _, _) = and_chain(3);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    settle(&mut sim);
    let before = sim.stats().gate_execs();
    sim.set(a.id, &lit("4'd0")).unwrap();
    settle(&mut sim);
    assert_eq!(sim.stats().gate_execs(), before);
}

#[test]
fn delay_shifts_visibility() {
    let mut c = Circuit::new();
    c.set_delays(crate::builder::Delays { comb: 5, reg: 1, wire: 0 });
    let a = c.uint("a", 1, 0).unwrap();
    let y = c.not(a).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.run_until(9).unwrap();
    sim.set(a.id, &lit("1'b1")).unwrap();
    sim.run_until(14).unwrap();
    assert_eq!(sim.get(y.id), lit("1'b1"));
    sim.run_until(15).unwrap();
    assert_eq!(sim.get(y.id), lit("1'b0"));
}

#[test]
fn scheduling_into_past_fails() {
    let (d, a, _, _) = and_chain(1);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.run_until(10).unwrap();
    assert!(matches!(sim.schedule(10, a.id, &lit("4'd1")), Err(SimError::Past { .. })));
    assert!(matches!(sim.set(a.id, &lit("2'd1")), Err(SimError::Width { .. })));
    assert!(sim.schedule(11, a.id, &lit("4'd1")).is_ok());
}

#[test]
fn empty_queue_runs_no_slots() {
    let (d, ..) = and_chain(1);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    settle(&mut sim);
    assert_eq!(sim.run_until(1000).unwrap(), 0);
}

fn counter() -> (Design, Signal) {
    let mut c = Circuit::new();
    let r = c.reg_uint("count", 4, 0).unwrap();
    let n = c.add(r, 1).unwrap();
    c.assign(r, n).unwrap();
    (c.elaborate().unwrap(), r)
}

#[test]
fn register_counts_clock_edges() {
    let (d, r) = counter();
    for strategy in Strategy::ALL {
        let mut sim = Simulator::new(&d.graph, strategy).unwrap();
        sim.add_clock(d.clock.unwrap().clk, 50);
        // rising edges at 50, 150, ..., 950
        sim.run_until(1000).unwrap();
        assert_eq!(sim.get(r.id), lit("4'd10"), "{strategy:?}");
        assert!(sim.audit().is_empty());
    }
}

#[test]
fn register_fires_full_function() {
    let (d, _) = counter();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.add_clock(d.clock.unwrap().clk, 50);
    sim.run_until(40).unwrap();
    let full = sim.stats().full_execs;
    sim.run_until(60).unwrap();
    assert_eq!(sim.stats().full_execs, full + 1);
}

#[test]
fn async_reset_loads_init() {
    let (d, r) = counter();
    let clk = d.clock.unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.add_clock(clk.clk, 50);
    sim.run_until(400).unwrap();
    assert_eq!(sim.get(r.id), lit("4'd4"));
    sim.set(clk.rst_n, &lit("1'b0")).unwrap();
    sim.run_until(410).unwrap();
    assert_eq!(sim.get(r.id), lit("4'd0"));
    sim.set(clk.rst_n, &lit("1'b1")).unwrap();
    // edges at 450 and 550
    sim.run_until(600).unwrap();
    assert_eq!(sim.get(r.id), lit("4'd2"));
    sim.set(clk.rst_n, &lit("1'bx")).unwrap();
    sim.run_until(610).unwrap();
    assert_eq!(sim.get(r.id), lit("4'b00x0"));
}

#[test]
fn swap_needs_no_extra_region() {
    let mut c = Circuit::new();
    let a = c.reg_uint("a", 2, 1).unwrap();
    let b = c.reg_uint("b", 2, 2).unwrap();
    c.assign(a, b).unwrap();
    c.assign(b, a).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.add_clock(d.clock.unwrap().clk, 50);
    sim.run_until(100).unwrap();
    assert_eq!((sim.get(a.id), sim.get(b.id)), (lit("2'd2"), lit("2'd1")));
}

#[test]
fn zero_delay_wires_settle_in_one_slot() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let mut s = a;
    for i in 0..5 {
        let w = c.uint(&format!("w{i}"), 1, 0).unwrap();
        c.assign(w, s).unwrap();
        s = w;
    }
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.run_until(0).unwrap();
    sim.set(a.id, &lit("1'b1")).unwrap();
    sim.run_until(1).unwrap();
    assert_eq!(sim.get(s.id), lit("1'b1"));
    assert_eq!(sim.stats().multi_exec, 0);
}

#[test]
fn trace_keeps_end_of_slot_values() {
    let (d, a, _, y) = and_chain(1);
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    sim.record(y.id);
    sim.record(a.id);
    sim.schedule(5, a.id, &lit("4'd1")).unwrap();
    sim.schedule(5, a.id, &lit("4'd0")).unwrap();
    sim.schedule(7, a.id, &lit("4'd3")).unwrap();
    sim.run_until(20).unwrap();
    let t = sim.trace();
    // the gate output starts undriven and settles to 0 in slot 1
    assert_eq!(t.initial, vec![lit("4'bxxxx"), lit("4'd0")]);
    assert_eq!(t.changes, vec![(1, y.id, lit("4'd0")), (7, a.id, lit("4'd3"))]);
}

#[test]
fn strategies_agree_on_x_stimulus() {
    let mut c = Circuit::new();
    let a = c.uint("a", 4, 0).unwrap();
    let b = c.uint("b", 4, 0).unwrap();
    let s = c.add(a, b).unwrap();
    let e = c.eq(s, 6).unwrap();
    let m = c.mux(e, a, b).unwrap();
    let d = c.elaborate().unwrap();
    let stim = ["4'd1", "4'bx010", "4'd5", "4'd3"];
    let run = |strategy| {
        let mut sim = Simulator::new(&d.graph, strategy).unwrap();
        sim.record(m.id);
        sim.record(e.id);
        for (i, v) in stim.iter().enumerate() {
            sim.schedule(10 * i as u64 + 1, a.id, &lit(v)).unwrap();
            sim.schedule(10 * i as u64 + 1, b.id, &lit(stim[(i + 1) % 4])).unwrap();
        }
        sim.run_until(100).unwrap();
        assert!(sim.audit().is_empty());
        sim.trace().clone()
    };
    assert_eq!(run(Strategy::Optimized), run(Strategy::AlwaysFull));
    assert_ne!(run(Strategy::BinaryOnly), run(Strategy::AlwaysFull));
}
