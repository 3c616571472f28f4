use super::*;
use crate::ir::{NetlistKind, TargetRange};

fn netlist_of(d: &Design, s: Signal) -> crate::ir::Netlist {
    let g = d.graph.signal(s.id).writer.as_ref().unwrap().gate;
    match &d.graph.gate(g).kind {
        GateKind::Netlist(n) => (**n).clone(),
        k => panic!("not a netlist: {}", k.name()),
    }
}

#[test]
fn xor_keeps_width() {
    let mut c = Circuit::new();
    let a = c.uint("a", 8, 0).unwrap();
    let b = c.uint("b", 8, 0).unwrap();
    let n = c.graph().gates().len();
    let s = c.xor(a, b).unwrap();
    assert_eq!(c.width(s), 8);
    assert_eq!(c.graph().gates().len(), n + 1);
}

#[test]
fn add_widens_by_one() {
    let mut c = Circuit::new();
    let x = c.uint("x", 32, 0).unwrap();
    let y = c.uint("y", 32, 0).unwrap();
    let s = c.add(x, y).unwrap();
    assert_eq!(c.width(s), 33);
    let m = c.mul(x, y).unwrap();
    assert_eq!(c.width(m), 64);
}

#[test]
fn narrower_operand_is_extended() {
    let mut c = Circuit::new();
    let a = c.uint("a", 8, 0).unwrap();
    let b = c.uint("b", 4, 0).unwrap();
    let s = c.and(a, b).unwrap();
    assert_eq!(c.width(s), 8);
    let resize = c
        .graph()
        .gates()
        .iter()
        .find(|g| matches!(g.kind, GateKind::Resize { .. }))
        .unwrap();
    assert_eq!(resize.kind, GateKind::Resize { width: 8, signed: false });
    assert_eq!(resize.inputs[0].signal, b.id);
}

#[test]
fn signed_extension_uses_narrow_operand_signedness() {
    let mut c = Circuit::new();
    let a = c.uint("a", 8, 0).unwrap();
    let b = c.sint("b", 4, -1).unwrap();
    c.add(a, b).unwrap();
    assert!(c
        .graph()
        .gates()
        .iter()
        .any(|g| g.kind == GateKind::Resize { width: 8, signed: true }));
}

#[test]
fn literal_adopts_signal_width() {
    let mut c = Circuit::new();
    let a = c.uint("a", 8, 0).unwrap();
    let s = c.add(a, 1).unwrap();
    assert_eq!(c.width(s), 9);
    assert!(c.add(a, 256).is_err());
}

#[test]
fn assign_to_expression_rejected() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let n = c.not(a).unwrap();
    assert!(matches!(c.assign(n, 1), Err(BuildError::NotAssignable(_, "not"))));
}

#[test]
fn assignments_recorded_in_order() {
    let mut c = Circuit::new();
    let t = c.uint("t", 4, 0).unwrap();
    c.assign(t, 1).unwrap();
    c.assign(t, 2).unwrap();
    let d = c.elaborate().unwrap();
    let n = netlist_of(&d, t);
    assert_eq!(n.kind, NetlistKind::Wire);
    assert_eq!(n.assigns.len(), 2);
    assert!(n.assigns.iter().all(|a| a.conds.is_empty() && a.range == TargetRange::Full));
}

#[test]
fn when_chain_conjuncts() {
    let mut c = Circuit::new();
    let p = c.uint("p", 1, 0).unwrap();
    let q = c.uint("q", 1, 0).unwrap();
    let t = c.uint("t", 2, 0).unwrap();
    c.when_begin(p).unwrap();
    c.assign(t, 1).unwrap();
    c.elsewhen(q).unwrap();
    c.assign(t, 2).unwrap();
    c.otherwise().unwrap();
    c.assign(t, 3).unwrap();
    c.when_end().unwrap();
    let d = c.elaborate().unwrap();
    let n = netlist_of(&d, t);
    let g = d.graph.gate(d.graph.signal(t.id).writer.as_ref().unwrap().gate);
    let sig = |i: usize| g.inputs[i].signal;
    let shape: Vec<Vec<(SignalId, bool)>> = n
        .assigns
        .iter()
        .map(|a| a.conds.iter().map(|t| (sig(t.input), t.polarity)).collect())
        .collect();
    assert_eq!(
        shape,
        vec![
            vec![(p.id, true)],
            vec![(p.id, false), (q.id, true)],
            vec![(p.id, false), (q.id, false)],
        ]
    );
    // p, q, and the three literal values; conditions share edges
    assert_eq!(g.inputs.len(), 5);
}

#[test]
fn unbalanced_constructs() {
    let mut c = Circuit::new();
    assert!(c.elsewhen(1).is_err());
    assert!(c.when_end().is_err());
    assert!(c.case_begin(1).is_err());
    let s = c.uint("s", 2, 0).unwrap();
    c.switch_begin(s, false).unwrap();
    let t = c.uint("t", 2, 0).unwrap();
    assert!(c.assign(t, 1).is_err());
    assert!(c.case_begin("3'd1").is_err());
    c.case_begin(1).unwrap();
    c.assign(t, 1).unwrap();
    assert!(c.elaborate().is_err());
}

#[test]
fn enum_register_width_fixed_at_freeze() {
    let mut c = Circuit::new();
    let e = c.new_enum("state", crate::ir::EnumEncoding::OneHot);
    let s = c.reg_enum("s", e).unwrap();
    assert_eq!(c.width(s), 0);
    c.switch_begin(s, false).unwrap();
    for (from, to) in [("a", "b"), ("b", "c"), ("c", "a")] {
        c.case_begin(from).unwrap();
        c.assign(s, to).unwrap();
    }
    c.switch_end().unwrap();
    let d = c.elaborate().unwrap();
    let sd = d.graph.signal(s.id);
    assert_eq!(sd.width, 3);
    assert_eq!(sd.init, Init::Value("3'b001".parse().unwrap()));
    assert!(d.audit().is_empty());
}

#[test]
fn full_adder_ports_inferred() {
    let mut c = Circuit::new();
    let fa = c
        .module("FullAdder", |c| {
            let a = c.uint("a", 1, 0)?;
            let b = c.uint("b", 1, 0)?;
            let cin = c.uint("cin", 1, 0)?;
            let ab = c.xor(a, b)?;
            let s = c.xor(ab, cin)?;
            c.name(s, "s");
            let g = c.and(a, b)?;
            let p = c.and(ab, cin)?;
            let cout = c.or(g, p)?;
            c.name(cout, "cout");
            Ok((a, b, cin, s, cout))
        })
        .unwrap();
    let d = c.elaborate().unwrap();
    let (a, b, cin, s, cout) = fa.io;
    let ports = &d.module(fa.id).ports;
    let expect = vec![
        Port { signal: a.id, dir: PortDir::Input },
        Port { signal: b.id, dir: PortDir::Input },
        Port { signal: cin.id, dir: PortDir::Input },
        Port { signal: s.id, dir: PortDir::Output },
        Port { signal: cout.id, dir: PortDir::Output },
    ];
    assert_eq!(ports, &expect);
    assert_eq!(d.infer_ports(), d.infer_ports());
}

#[test]
fn marks_override_inference() {
    let mut c = Circuit::new();
    let m = c
        .module("M", |c| {
            let x = c.input("x", 4, 0)?;
            let y = c.output("y", 4, 0)?;
            Ok((x, y))
        })
        .unwrap();
    let d = c.elaborate().unwrap();
    let (x, y) = m.io;
    assert_eq!(
        d.module(m.id).ports,
        vec![
            Port { signal: x.id, dir: PortDir::Input },
            Port { signal: y.id, dir: PortDir::Output },
        ]
    );
}

#[test]
fn parent_assignment_places_wire_outside_child() {
    let mut c = Circuit::new();
    let top = c
        .module("Top", |c| {
            let x = c.input("x", 1, 0)?;
            let child = c.module("Child", |c| {
                let a = c.uint("a", 1, 0)?;
                let na = c.not(a)?;
                Ok((a, c.name(na, "na")))
            })?;
            c.assign(child.io.0, x)?;
            Ok((x, child))
        })
        .unwrap();
    let d = c.elaborate().unwrap();
    let (_, child) = top.io;
    let wire = d.graph.signal(child.io.0.id).writer.as_ref().unwrap().gate;
    assert_eq!(d.graph.gate(wire).location, Some(top.id));
    assert_eq!(
        d.module(child.id).ports,
        vec![
            Port { signal: child.io.0.id, dir: PortDir::Input },
            Port { signal: child.io.1.id, dir: PortDir::Output },
        ]
    );
    assert_eq!(d.scope_of(child.io.0.id), Some(top.id));
}

#[test]
fn connect_resolves_direction() {
    let mut c = Circuit::new();
    let a = c.module("A", |c| {
        let o = c.uint("o", 2, 0)?;
        c.assign(o, 3)?;
        Ok(o)
    });
    let b = c.module("B", |c| {
        let i = c.uint_x("i", 2)?;
        let n = c.not(i)?;
        Ok((i, c.name(n, "n")))
    });
    let (a, b) = (a.unwrap(), b.unwrap());
    c.connect(b.io.0, a.io);
    let d = c.elaborate().unwrap();
    assert_eq!(d.module(a.id).ports, vec![Port { signal: a.io.id, dir: PortDir::Output }]);
    assert_eq!(d.module(b.id).ports[0], Port { signal: b.io.0.id, dir: PortDir::Input });
}

#[test]
fn connect_rejects_two_drivers() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let b = c.uint("b", 1, 0).unwrap();
    c.assign(a, 1).unwrap();
    c.assign(b, 0).unwrap();
    c.connect(a, b);
    assert!(matches!(c.elaborate(), Err(BuildError::Connect(_))));
}

#[test]
fn params_follow_module_names() {
    let tree = ParamTree::new()
        .child("RippleCarry", |n| n.set("w", 32))
        .child("KoggeStone", |n| n.set("w", 64));
    let mut c = Circuit::with_params(tree);
    let r = c.module("RippleCarry", |c| c.param_int("w")).unwrap();
    let k = c.module("KoggeStone", |c| c.param_int("w")).unwrap();
    assert_eq!((r.io, k.io), (32, 64));
    assert!(c.module("Other", |c| c.param_int("w")).is_err());
}

#[test]
fn vectorized_add_matches_elementwise() {
    let mut c = Circuit::new();
    let a: Vec<Signal> = (0..2).map(|i| c.uint(&format!("a{i}"), 8, 0).unwrap()).collect();
    let b: Vec<Signal> = (0..2).map(|i| c.uint(&format!("b{i}"), 8, 0).unwrap()).collect();
    let arr = |v: &[Signal]| HArray::list(v.iter().map(|s| Operand::Sig(*s)));
    let out = c.vectorized(Op::Add, &[arr(&a), arr(&b)]).unwrap();
    assert_eq!(out.shape(), vec![2]);
    for s in out.leaves() {
        assert_eq!(c.width(*s), 9);
    }
    let one = c.vectorized(Op::Add, &[arr(&a), HArray::leaf(Operand::Int(1))]).unwrap();
    assert_eq!(one.len(), 2);
}

#[test]
fn dynamic_assign_range_checked() {
    let mut c = Circuit::new();
    let a = c.uint("a", 16, 0).unwrap();
    let idx = c.uint("idx", 4, 0).unwrap();
    assert!(c.assign_dynamic(a, idx, 17, 0).is_err());
    c.assign_dynamic(a, idx, 8, 0xff).unwrap();
    assert!(c.assign_range(a, 12, 8, 0).is_err());
}

#[test]
fn registers_use_default_domain() {
    let mut c = Circuit::new();
    let r = c.reg_uint("r", 8, 0).unwrap();
    c.assign(r, 5).unwrap();
    let d = c.elaborate().unwrap();
    let clk = d.clock.unwrap();
    let g = d.graph.gate(d.graph.signal(r.id).writer.as_ref().unwrap().gate);
    assert!(g.always_full_sim);
    assert_eq!(g.inputs[0].signal, clk.clk);
    assert_eq!(g.inputs[1].signal, clk.rst_n);
    assert_eq!(g.triggers.len(), 2);
}
