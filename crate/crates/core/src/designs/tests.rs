use super::*;
use crate::sim::{Simulator, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn add_check(build: fn(&mut Circuit) -> Result<Instance<AdderIo>>, w: usize) {
    let mut c = Circuit::with_params(adder_config_width(w));
    let dut = build(&mut c).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = crate::logic::mask64(w);
    for _ in 0..50 {
        let (x, y) = (rng.gen::<u64>() & m, rng.gen::<u64>() & m);
        sim.set(dut.io.x.id, &Logic::from_u64(w, x)).unwrap();
        sim.set(dut.io.y.id, &Logic::from_u64(w, y)).unwrap();
        let t = sim.time() + 100;
        sim.run_until(t).unwrap();
        let got = sim.get(dut.io.out.id).to_u128().unwrap();
        assert_eq!(got, x as u128 + y as u128, "{x} + {y}");
    }
    assert!(sim.audit().is_empty());
}

#[test]
fn ripple_carry_adds() {
    add_check(ripple_carry, 8);
}

#[test]
fn kogge_stone_adds() {
    add_check(kogge_stone, 8);
    add_check(kogge_stone, 5);
}

#[test]
fn config_assigns_widths_by_module() {
    let mut c = Circuit::with_params(adder_config());
    let r = ripple_carry(&mut c).unwrap();
    let k = kogge_stone(&mut c).unwrap();
    assert_eq!(c.width(r.io.out), 33);
    assert_eq!(c.width(k.io.out), 65);
}

#[test]
fn wallace_multiplies() {
    let w = 8;
    let mut c = Circuit::new();
    let dut = wallace(&mut c, w).unwrap();
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let (a, b) = (rng.gen_range(0..256u64), rng.gen_range(0..256u64));
        sim.set(dut.io.a.id, &Logic::from_u64(w, a)).unwrap();
        sim.set(dut.io.b.id, &Logic::from_u64(w, b)).unwrap();
        let t = sim.time() + 100;
        sim.run_until(t).unwrap();
        assert_eq!(sim.get(dut.io.prod.id).to_u64(), Some(a * b));
    }
}

#[test]
fn vending_states_are_onehot() {
    let mut c = Circuit::new();
    let v = vending(&mut c).unwrap();
    let d = c.elaborate().unwrap();
    let e = d.graph.signal(v.io.state.id);
    assert_eq!(e.width, 5);
    let ty = e.ty.enum_id().unwrap();
    assert_eq!(d.enums[ty.0 as usize].states(), VENDING_STATES);
}

#[test]
fn random_dag_is_deterministic() {
    let build = || {
        let mut c = Circuit::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        random_dag(&mut c, &mut rng, 4, 50).unwrap();
        c.elaborate().unwrap().graph.dump()
    };
    assert_eq!(build(), build());
}
