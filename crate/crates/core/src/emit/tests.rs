use super::verilog::{Expr, Item, LRange, Lvalue};
use super::*;
use crate::builder::Circuit;
use crate::designs::{full_adder, random_dag, vending, wallace};
use crate::ir::{SignalType, Init, PortDir};
use crate::logic::{lit, Logic};
use crate::sim::{Simulator, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn id_codes_are_base_94() {
    assert_eq!(vcd::id_code(0), "!");
    assert_eq!(vcd::id_code(93), "~");
    assert_eq!(vcd::id_code(94), "!!");
    assert_eq!(vcd::id_code(95), "\"!");
    let codes: std::collections::HashSet<String> = (0..20_000).map(vcd::id_code).collect();
    assert_eq!(codes.len(), 20_000);
}

#[test]
fn vcd_shape() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let b = c.uint("b", 4, 0).unwrap();
    c.track(&[a, b]);
    let d = c.elaborate().unwrap();
    let mut sim = Simulator::new(&d.graph, Strategy::Optimized).unwrap();
    for s in [a, b] {
        sim.record(s.id);
    }
    sim.schedule(5, a.id, &lit("1'b1")).unwrap();
    sim.schedule(5, b.id, &lit("4'b1x10")).unwrap();
    sim.run_until(10).unwrap();
    let text = write_vcd(&d, sim.trace(), "top");
    assert!(text.contains("$timescale 1ns $end"));
    assert!(text.contains("$scope module top $end\n$var wire 1 ! a $end\n$var wire 4 \" b [3:0] $end"));
    assert!(text.ends_with("#0\n$dumpvars\n0!\nb0000 \"\n$end\n#5\n1!\nb1x10 \"\n"), "{text}");
}

#[test]
fn untracked_signals_are_absent() {
    let mut c = Circuit::new();
    let a = c.uint("a", 1, 0).unwrap();
    let _b = c.uint("hidden", 1, 0).unwrap();
    c.track(&[a, a]);
    let d = c.elaborate().unwrap();
    let sess = crate::verify::Session::new(d, Strategy::Optimized, 0).unwrap();
    let text = sess.vcd("top");
    assert!(text.contains(" a $end"));
    assert!(!text.contains("hidden"));
    assert_eq!(text.matches("$var").count(), 1);
}

#[test]
fn full_adder_has_three_assigns() {
    let mut c = Circuit::new();
    full_adder(&mut c).unwrap();
    let d = c.elaborate().unwrap();
    let v = emit_verilog(&d, "top").unwrap();
    let fa = &v.units[0];
    assert_eq!(fa.name, "FullAdder");
    let ports: Vec<(&str, PortDir)> = fa.ports.iter().map(|p| (p.0.as_str(), p.1)).collect();
    use PortDir::*;
    assert_eq!(
        ports,
        [("a", Input), ("b", Input), ("cin", Input), ("s", Output), ("cout", Output)]
    );
    assert_eq!(fa.items.iter().filter(|i| matches!(i, Item::Assign { .. })).count(), 3);
    assert!(v.lint().is_empty());
}

#[test]
fn registers_and_switches() {
    let mut c = Circuit::new();
    vending(&mut c).unwrap();
    let d = c.elaborate().unwrap();
    let text = emit_verilog(&d, "top").unwrap().render();
    assert!(text.contains("always @(posedge clk or negedge rst_n) begin\n    if (!rst_n) begin\n      s <= sIdle;"));
    assert!(text.contains("localparam logic [4:0] sOk = 5'b10000;"));
    assert!(text.contains("      case (s)\n"));

    let mut c = Circuit::new();
    let sel = c.uint("sel", 2, 0).unwrap();
    let y = c.uint("y", 4, 0).unwrap();
    c.switch_begin(sel, true).unwrap();
    c.case_begin(1).unwrap();
    c.assign(y, 3).unwrap();
    c.case_begin(2).unwrap();
    c.assign(y, 5).unwrap();
    c.switch_end().unwrap();
    let d = c.elaborate().unwrap();
    let v = emit_verilog(&d, "top").unwrap();
    assert!(v.render().contains("unique case (sel)\n      2'b01: begin\n        y = 4'b0011;"));
    assert!(v.lint().is_empty(), "{:?}", v.lint());
}

#[test]
fn storage_and_tristate_idioms() {
    let mut c = Circuit::new();
    let en = c.uint("en", 1, 0).unwrap();
    let d_in = c.uint("d", 8, 0).unwrap();
    let idx = c.uint("idx", 3, 0).unwrap();
    let l = c.latch("l", SignalType::UInt(8), Init::Value(Logic::zeros(8)), en).unwrap();
    c.assign(l, d_in).unwrap();
    let t = c.wtri("bus", en, d_in).unwrap();
    let w = c.uint("w", 8, 0).unwrap();
    c.assign_dynamic(w, idx, 2, d_in).unwrap();
    let m = c.mem("ram", 4, 3).unwrap();
    let r = c.mem_read(&m, idx).unwrap();
    c.name(r, "rd");
    c.track(&[l, t, w]);
    let d = c.elaborate().unwrap();
    let v = emit_verilog(&d, "top").unwrap();
    let text = v.render();
    assert!(text.contains("if (en) begin\n      l = d;"), "{text}");
    assert!(text.contains("assign bus = en ? d : 'z;"), "{text}");
    assert!(text.contains("assign t = d[1:0];"), "{text}");
    assert!(text.contains("w = 8'b00000000;\n    w[idx +: 2] = t;"), "{text}");
    assert!(text.contains("default: begin\n        rd = 4'bx;"), "{text}");
    assert!(v.lint().is_empty(), "{:?}", v.lint());
}

#[test]
fn generated_designs_pass_lint() {
    for seed in 0..20 {
        let mut c = Circuit::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_dag(&mut c, &mut rng, 4, 50).unwrap();
        let d = c.elaborate().unwrap();
        let v = emit_verilog(&d, "top").unwrap();
        assert!(v.lint().is_empty(), "seed {seed}: {:?}", v.lint());
    }
    let mut c = Circuit::new();
    wallace(&mut c, 6).unwrap();
    let d = c.elaborate().unwrap();
    let v = emit_verilog(&d, "top").unwrap();
    assert!(v.lint().is_empty(), "{:?}", v.lint());
}

#[test]
fn emission_is_deterministic() {
    let build = || {
        let mut c = Circuit::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        random_dag(&mut c, &mut rng, 3, 30).unwrap();
        emit_verilog(&c.elaborate().unwrap(), "top").unwrap().render()
    };
    assert_eq!(build(), build());
}

#[test]
fn lint_reports_violations() {
    let u = VerilogUnit {
        name: "m".into(),
        ports: vec![("a".into(), PortDir::Input, 4), ("y".into(), PortDir::Output, 2)],
        params: vec![],
        decls: vec![("a".into(), 4)],
        items: vec![
            Item::Assign {
                lhs: Lvalue { name: "y".into(), width: 2, range: LRange::Full },
                rhs: Expr::Ref("a".into(), 4),
            },
            Item::Assign {
                lhs: Lvalue { name: "y".into(), width: 2, range: LRange::Full },
                rhs: Expr::Ref("ghost".into(), 2),
            },
            Item::Assign {
                lhs: Lvalue { name: "a".into(), width: 4, range: LRange::Full },
                rhs: Expr::Lit(Logic::zeros(4)),
            },
        ],
    };
    let v = u.lint(&[]);
    let has = |s: &str| v.iter().any(|m| m.contains(s));
    assert!(has("`a` declared more than once"), "{v:?}");
    assert!(has("width mismatch in assign y: 2 vs 4"), "{v:?}");
    assert!(has("`ghost` used but not declared"), "{v:?}");
    assert!(has("`y` has 2 drivers"), "{v:?}");
    assert!(has("input `a` is driven"), "{v:?}");
}
