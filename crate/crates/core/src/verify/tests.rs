use super::pattern::{fell, rose, sig, wait};
use super::*;
use crate::builder::{Circuit, Instance, Signal};
use crate::designs::{adder_config_width, kogge_stone, ripple_carry, AdderIo};
use crate::logic::lit;

fn adders(w: usize) -> (Design, Instance<AdderIo>, Instance<AdderIo>) {
    let mut c = Circuit::with_params(adder_config_width(w));
    c.default_clock().unwrap();
    let a1 = ripple_carry(&mut c).unwrap();
    let a2 = kogge_stone(&mut c).unwrap();
    (c.elaborate().unwrap(), a1, a2)
}

async fn adder_tb(tb: Tb, io: AdderIo, n: usize) -> Result<(), VerifyError> {
    for _ in 0..n {
        let v = tb.setr(&[io.x.id, io.y.id])?;
        tb.clock_n(1).await?;
        let expect = v[0].add(&v[1], false).unwrap();
        tb.assert_eq(&tb.getv(io.out), &expect, "out");
    }
    Ok(())
}

#[test]
fn adder_testbench_passes_for_both_adders() {
    let (d, a1, a2) = adders(32);
    let mut sess = Session::new(d, Strategy::Optimized, 1).unwrap();
    let t1 = sess.spawn("ripple", |tb| adder_tb(tb, a1.io, 100));
    let t2 = sess.spawn("kogge", |tb| adder_tb(tb, a2.io, 200));
    sess.join(&[t1, t2]).unwrap();
    let l = sess.ledger();
    assert_eq!((l.passed(), l.failed()), (300, 0), "{}", l.report(5));
    // 200 falling edges at 100, 200, ...
    assert_eq!(sess.time(), 20_000);
}

#[test]
fn seeded_draws_repeat() {
    let run = |seed| {
        let (d, a1, _) = adders(8);
        let mut sess = Session::new(d, Strategy::Optimized, seed).unwrap();
        let out = Rc::new(RefCell::new(Vec::new()));
        let o = out.clone();
        let t = sess.spawn("draw", move |tb| async move {
            for _ in 0..5 {
                o.borrow_mut().extend(tb.setr(&[a1.io.x.id, a1.io.y.id])?);
                tb.delay(3).await?;
            }
            Ok(())
        });
        sess.join(&[t]).unwrap();
        let v = out.borrow().clone();
        v
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}

fn inverter() -> (Design, Signal, Signal) {
    let mut c = Circuit::new();
    c.default_clock().unwrap();
    let a = c.uint("a", 1, 0).unwrap();
    let y = c.not(a).unwrap();
    (c.elaborate().unwrap(), a, y)
}

#[test]
fn delay_zero_sees_update_in_same_slot() {
    let (d, a, y) = inverter();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let t = sess.spawn("delta", move |tb| async move {
        tb.delay(7).await?;
        tb.setv_u64(a, 1)?;
        tb.check(tb.getv(a) == lit("1'b0"), "old value before the round");
        tb.delay(0).await?;
        tb.check(tb.getv(a) == lit("1'b1"), "input updated");
        tb.check(tb.getv(y) == lit("1'b1"), "gate output not yet updated");
        tb.check(tb.now() == 7, "same slot");
        tb.delay(1).await?;
        tb.check(tb.getv(y) == lit("1'b0"), "gate output after its delay");
        Ok(())
    });
    sess.join(&[t]).unwrap();
    let l = sess.ledger();
    assert_eq!(l.failed(), 0, "{}", l.report(5));
    assert_eq!(l.passed(), 5);
}

#[test]
fn same_edge_resumes_in_spawn_order() {
    let (d, ..) = inverter();
    let clk = d.clock.unwrap().clk;
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let order = Rc::new(RefCell::new(Vec::new()));
    let mut ids = Vec::new();
    for name in ["first", "second", "third"] {
        let o = order.clone();
        ids.push(sess.spawn(name, move |tb| async move {
            tb.posedge(clk).await?;
            o.borrow_mut().push((name, tb.now()));
            Ok(())
        }));
    }
    sess.join(&ids).unwrap();
    assert_eq!(*order.borrow(), vec![("first", 50), ("second", 50), ("third", 50)]);
}

#[test]
fn joining_twice_fails_the_task() {
    let (d, ..) = inverter();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let t = sess.spawn("parent", |tb| async move {
        let c = tb.spawn("child", |tb| async move { tb.delay(2).await });
        tb.join(&[c]).await?;
        tb.check(tb.now() == 2, "child finished at 2");
        tb.join(&[c]).await
    });
    let err = sess.join(&[t]).unwrap_err();
    assert_eq!(
        err,
        VerifyError::Task {
            task: "parent".into(),
            message: VerifyError::JoinedTwice(1).to_string()
        }
    );
    assert_eq!(sess.ledger().passed(), 1);
}

#[test]
fn driving_gate_output_is_rejected() {
    let (d, _, y) = inverter();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let t = sess.spawn("bad", move |tb| async move { tb.setv_u64(y, 1) });
    assert!(matches!(sess.join(&[t]), Err(VerifyError::Task { .. })));
}

#[test]
fn stalled_join_is_reported() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let d = c.elaborate().unwrap();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let t = sess.spawn("forever", move |tb| async move { tb.posedge(a).await });
    assert_eq!(sess.join(&[t]), Err(VerifyError::Stalled(1)));
}

#[test]
fn assert_eq_treats_x_structurally() {
    assert!(check_equal(&lit("4'b1x00"), &lit("4'b1x00")));
    assert!(!check_equal(&lit("4'b1x00"), &lit("4'b1100")));
    assert!(check_equal(&lit("3'd5"), &lit("5'd5")));
}

/// Drives `en` with the given value before each rising edge of the clock
/// and checks "en falls one cycle after it rises".
fn run_p1(values: &'static [u64], reset_low_at: Option<usize>) -> Ledger {
    let mut c = Circuit::new();
    let clk = c.default_clock().unwrap();
    let en = c.uint("en", 1, 0).unwrap();
    let d = c.elaborate().unwrap();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let a = sess.clocked_assertion("a").unwrap();
    sess.check(a, "p1", rose(en).implies(wait(1) >> fell(en))).unwrap();
    let t = sess.spawn("stim", move |tb| async move {
        for (i, v) in values.iter().enumerate() {
            tb.setv_u64(en, *v)?;
            if reset_low_at == Some(i) {
                tb.setv_u64(clk.rst_n, 0)?;
            }
            tb.clock(1).await?;
        }
        Ok(())
    });
    sess.join(&[t]).unwrap();
    sess.ledger()
}

#[test]
fn fall_after_rise_property() {
    let good = run_p1(&[0, 1, 0], None);
    assert_eq!((good.passed(), good.failed()), (3, 0), "{}", good.report(5));
    let bad = run_p1(&[0, 1, 1], None);
    assert_eq!(bad.failed(), 1, "{}", bad.report(5));
    let f = bad.failures().next().unwrap();
    assert_eq!((f.time, f.source.as_str()), (250, "a.p1"));
}

#[test]
fn disable_discards_attempts_without_failing() {
    // the rise at step 1 would fail at step 2, but reset is low then
    let l = run_p1(&[0, 1, 1], Some(2));
    assert_eq!(l.failed(), 0, "{}", l.report(5));
    assert_eq!(l.disabled, 1);
}

#[test]
fn assertion_samples_preponed_values() {
    let mut c = Circuit::new();
    c.default_clock().unwrap();
    let r = c.reg_uint("r", 1, 0).unwrap();
    let n = c.not(r).unwrap();
    c.assign(r, n).unwrap();
    let d = c.elaborate().unwrap();
    let mut sess = Session::new(d, Strategy::Optimized, 0).unwrap();
    let a = sess.assertion("toggle", (d_clk(&sess), lit("1'b1")), None);
    // r toggles on every edge; sampled before the edge it reads 0, 1, 0, ...
    sess.check(a, "alternates", (!sig(r)) >> wait(1) >> sig(r)).unwrap();
    sess.run_until(260).unwrap();
    let l = sess.ledger();
    assert_eq!((l.passed(), l.failed()), (1, 1), "{}", l.report(5));
    assert_eq!(l.unfinished, 1);
    sess.run_until(360).unwrap();
    let l = sess.ledger();
    assert_eq!((l.passed(), l.failed(), l.unfinished), (2, 2, 0));
}

fn d_clk(s: &Session) -> SignalId {
    s.design().clock.unwrap().clk
}
