//! Gate functions: the three-state function over both planes and the
//! binary function over the value plane alone.

use crate::ir::{EdgeKind, GateKind, Netlist, NetlistKind, TargetRange};
use crate::logic::{mask64, Bit, CmpOp, Logic, ReduceKind};

/// Per-gate state the three-state function needs besides its inputs.
pub(crate) struct Ctx<'a> {
    /// Current output value (the held value of storage netlists).
    pub hold: &'a Logic,
    /// Declared initial value: Wire default, register reset value.
    pub init: &'a Logic,
    /// Clock level seen at the previous execution (registers only).
    pub prev_clock: &'a mut Bit,
}

/// Replaces the target range of `acc` with `value`.
fn apply(acc: &Logic, range: &TargetRange, value: &Logic, ins: &[Logic]) -> Logic {
    match range {
        TargetRange::Full => value.clone(),
        TargetRange::Static { low, .. } => {
            let idx = Logic::from_u64(64, *low as u64);
            acc.insert(&idx, value)
        }
        TargetRange::Dynamic { idx, .. } => acc.insert(&ins[*idx], value),
    }
}

/// Folds the prioritized assignment list over `start`. A definite 0 term
/// skips an assignment, all-1 terms take it, and otherwise the taken and
/// skipped alternatives are merged bitwise. An X term from a `unique` switch
/// leaves no alternative to fall back on and yields all-X.
pub fn resolve_assignments(n: &Netlist, ins: &[Logic], start: Logic) -> Logic {
    let width = start.width();
    let mut acc = start;
    for a in &n.assigns {
        let mut skip = false;
        let mut unknown = false;
        let mut unique_unknown = false;
        for t in &a.conds {
            match ins[t.input].bit(0) {
                Bit::X => {
                    unknown = true;
                    unique_unknown |= t.unique;
                }
                b => {
                    if (b == Bit::One) != t.polarity {
                        skip = true;
                        break;
                    }
                }
            }
        }
        if skip {
            continue;
        }
        if unique_unknown {
            acc = Logic::unknown(width);
            continue;
        }
        let cand = apply(&acc, &a.range, &ins[a.value], ins);
        acc = if unknown { acc.merge(&cand).expect("equal widths") } else { cand };
    }
    acc
}

enum Fire {
    No,
    Yes,
    Maybe,
}

fn edge(prev: Bit, now: Bit, kind: EdgeKind) -> Fire {
    let (from, to) = match kind {
        EdgeKind::Pos => (Bit::Zero, Bit::One),
        EdgeKind::Neg => (Bit::One, Bit::Zero),
    };
    match (prev, now) {
        (p, n) if p == from && n == to => Fire::Yes,
        (p, n) if p == n => Fire::No,
        (Bit::X, n) if n == to => Fire::Maybe,
        (p, Bit::X) if p == from => Fire::Maybe,
        _ => Fire::No,
    }
}

fn merge(a: &Logic, b: &Logic) -> Logic {
    a.merge(b).expect("equal widths")
}

/// Applies a reset level: asserted gives the reset value, X merges it in.
fn with_reset(level: Bit, active: bool, reset_value: &Logic, otherwise: Logic) -> Logic {
    match level {
        Bit::X => merge(reset_value, &otherwise),
        b if (b == Bit::One) == active => reset_value.clone(),
        _ => otherwise,
    }
}

fn netlist(n: &Netlist, ins: &[Logic], ctx: Ctx<'_>) -> Logic {
    match &n.kind {
        NetlistKind::Wire => resolve_assignments(n, ins, ctx.init.clone()),
        NetlistKind::Latch { enable, active } => match ins[*enable].bit(0) {
            Bit::X => merge(ctx.hold, &resolve_assignments(n, ins, ctx.hold.clone())),
            b if (b == Bit::One) == *active => resolve_assignments(n, ins, ctx.hold.clone()),
            _ => ctx.hold.clone(),
        },
        NetlistKind::Reg { clock, edge: kind, reset } => {
            let clk = ins[*clock].bit(0);
            let fire = edge(*ctx.prev_clock, clk, *kind);
            *ctx.prev_clock = clk;
            let load = || resolve_assignments(n, ins, ctx.hold.clone());
            let next = match fire {
                Fire::No => ctx.hold.clone(),
                Fire::Yes => load(),
                Fire::Maybe => merge(ctx.hold, &load()),
            };
            match reset {
                Some(r) if r.asynchronous => with_reset(ins[r.input].bit(0), r.active, ctx.init, next),
                Some(r) => match fire {
                    Fire::No => next,
                    Fire::Yes => with_reset(ins[r.input].bit(0), r.active, ctx.init, next),
                    Fire::Maybe => merge(
                        ctx.hold,
                        &with_reset(ins[r.input].bit(0), r.active, ctx.init, load()),
                    ),
                },
                None => next,
            }
        }
    }
}

/// Three-state gate function: computes both planes of the output.
pub(crate) fn full(kind: &GateKind, ins: &[Logic], out_width: usize, ctx: Ctx<'_>) -> Logic {
    let two = |f: fn(&Logic, &Logic) -> Result<Logic, crate::logic::LogicError>| {
        f(&ins[0], &ins[1]).expect("equal widths")
    };
    match kind {
        GateKind::Not => ins[0].not(),
        GateKind::And => two(Logic::and),
        GateKind::Or => two(Logic::or),
        GateKind::Xor => two(Logic::xor),
        GateKind::Reduce(k) => ins[0].reduce(*k),
        GateKind::Add { signed } => ins[0].add(&ins[1], *signed).expect("equal widths"),
        GateKind::Sub { signed } => ins[0].sub(&ins[1], *signed).expect("equal widths"),
        GateKind::Mul { signed } => ins[0].mul(&ins[1], *signed).expect("equal widths"),
        GateKind::Div => ins[0].divmod(&ins[1]).expect("equal widths").0,
        GateKind::Rem => ins[0].divmod(&ins[1]).expect("equal widths").1,
        GateKind::Cmp { op, signed } => ins[0].cmp(*op, &ins[1], *signed).expect("equal widths"),
        GateKind::Cat => Logic::cat(ins).expect("non-empty"),
        GateKind::Select { low, count } => ins[0].select(*low, *count),
        GateKind::DynSelect { count } => ins[0].dyn_select(&ins[1], *count),
        GateKind::Resize { width, signed } => ins[0].resize(*width, *signed),
        GateKind::Match(p) => p.matches(&ins[0]).expect("equal widths"),
        GateKind::Mux => match ins[0].bit(0) {
            Bit::Zero => ins[1].clone(),
            Bit::One => ins[2].clone(),
            Bit::X => merge(&ins[1], &ins[2]),
        },
        GateKind::Netlist(n) => netlist(n, ins, ctx),
        GateKind::Tri => match ins[0].bit(0) {
            Bit::One => ins[1].clone(),
            _ => Logic::unknown(out_width),
        },
        GateKind::MemRead { depth } => match ins[0].index_value() {
            Some(i) if i < *depth => ins[1 + i].clone(),
            _ => Logic::unknown(out_width),
        },
    }
}

/// Gate shapes with a single-word binary function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum FastOp {
    Not,
    And,
    Or,
    Xor,
    Reduce(ReduceKind),
    Add { signed: bool },
    Sub { signed: bool },
    Mul { signed: bool },
    Cmp { op: CmpOp, signed: bool },
    Cat,
    Select { low: u32 },
    Resize { signed: bool },
    Match { care: u64, value: u64 },
    Mux,
    Wire,
    /// No single-word function; the binary value is computed by the
    /// three-state function on value planes.
    Generic,
}

impl FastOp {
    /// Single-word binary function, if the gate has one. `narrow` means every
    /// input and the output fit in 64 bits.
    pub(crate) fn of(kind: &GateKind, narrow: bool) -> FastOp {
        if !narrow {
            return FastOp::Generic;
        }
        match kind {
            GateKind::Not => FastOp::Not,
            GateKind::And => FastOp::And,
            GateKind::Or => FastOp::Or,
            GateKind::Xor => FastOp::Xor,
            GateKind::Reduce(k) => FastOp::Reduce(*k),
            GateKind::Add { signed } => FastOp::Add { signed: *signed },
            GateKind::Sub { signed } => FastOp::Sub { signed: *signed },
            GateKind::Mul { signed } => FastOp::Mul { signed: *signed },
            GateKind::Cmp { op, signed } => FastOp::Cmp {
                op: *op,
                signed: *signed,
            },
            GateKind::Cat => FastOp::Cat,
            GateKind::Select { low, .. } => FastOp::Select { low: *low as u32 },
            GateKind::Resize { signed, .. } => FastOp::Resize { signed: *signed },
            GateKind::Match(p) => FastOp::Match {
                care: p.care().value_plane()[0],
                value: p.value().value_plane()[0],
            },
            GateKind::Mux => FastOp::Mux,
            GateKind::Netlist(n) if n.kind == NetlistKind::Wire => FastOp::Wire,
            _ => FastOp::Generic,
        }
    }
}

#[inline]
fn sext(v: u64, w: u32) -> i64 {
    let s = 64 - w;
    ((v << s) as i64) >> s
}

/// Binary gate function on single-word value planes. `ins[i]` holds input
/// `i` with width `widths[i]`; the result is masked to `out_width`.
#[inline]
pub(crate) fn fast(
    op: &FastOp,
    kind: &GateKind,
    ins: &[u64],
    widths: &[u32],
    out_width: u32,
    init: u64,
) -> u64 {
    let m = mask64(out_width as usize);
    let r = match op {
        FastOp::Not => !ins[0],
        FastOp::And => ins[0] & ins[1],
        FastOp::Or => ins[0] | ins[1],
        FastOp::Xor => ins[0] ^ ins[1],
        FastOp::Reduce(ReduceKind::And) => (ins[0] == mask64(widths[0] as usize)) as u64,
        FastOp::Reduce(ReduceKind::Or) => (ins[0] != 0) as u64,
        FastOp::Reduce(ReduceKind::Xor) => (ins[0].count_ones() & 1) as u64,
        FastOp::Add { signed: false } => ins[0].wrapping_add(ins[1]),
        FastOp::Sub { signed: false } => ins[0].wrapping_sub(ins[1]),
        FastOp::Mul { signed: false } => ins[0].wrapping_mul(ins[1]),
        FastOp::Add { signed: true } => sext(ins[0], widths[0]).wrapping_add(sext(ins[1], widths[1])) as u64,
        FastOp::Sub { signed: true } => sext(ins[0], widths[0]).wrapping_sub(sext(ins[1], widths[1])) as u64,
        FastOp::Mul { signed: true } => sext(ins[0], widths[0]).wrapping_mul(sext(ins[1], widths[1])) as u64,
        FastOp::Cmp { op, signed } => {
            let ord = if *signed {
                sext(ins[0], widths[0]).cmp(&sext(ins[1], widths[1]))
            } else {
                ins[0].cmp(&ins[1])
            };
            let b = match op {
                CmpOp::Eq => ord.is_eq(),
                CmpOp::Ne => ord.is_ne(),
                CmpOp::Lt => ord.is_lt(),
                CmpOp::Le => ord.is_le(),
                CmpOp::Gt => ord.is_gt(),
                CmpOp::Ge => ord.is_ge(),
            };
            b as u64
        }
        FastOp::Cat => {
            let mut acc = 0u64;
            let mut off = 0u32;
            for (v, w) in ins.iter().zip(widths) {
                acc |= v << off;
                off += w;
            }
            acc
        }
        FastOp::Select { low } => ins[0] >> low,
        FastOp::Resize { signed: true } => sext(ins[0], widths[0]) as u64,
        FastOp::Resize { signed: false } => ins[0],
        FastOp::Match { care, value } => (ins[0] & care == *value) as u64,
        FastOp::Mux => {
            if ins[0] & 1 == 1 {
                ins[2]
            } else {
                ins[1]
            }
        }
        FastOp::Wire => {
            let GateKind::Netlist(n) = kind else { unreachable!() };
            wire(n, ins, out_width, init)
        }
        FastOp::Generic => unreachable!("generic gates use the three-state function"),
    };
    r & m
}

fn wire(n: &Netlist, ins: &[u64], width: u32, init: u64) -> u64 {
    let mut acc = init;
    for a in &n.assigns {
        if a.conds.iter().any(|t| (ins[t.input] & 1 == 1) != t.polarity) {
            continue;
        }
        let v = ins[a.value];
        acc = match a.range {
            TargetRange::Full => v,
            TargetRange::Static { low, count } => {
                let m = mask64(count) << low;
                (acc & !m) | ((v << low) & m)
            }
            TargetRange::Dynamic { idx, count } => {
                let low = ins[idx];
                if low >= width as u64 {
                    acc
                } else {
                    let m = (mask64(count) << low) & mask64(width as usize);
                    (acc & !m) | ((v << low) & m)
                }
            }
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Assignment, CondTerm};
    use crate::logic::lit;

    fn cond(input: usize, polarity: bool) -> CondTerm {
        CondTerm {
            input,
            polarity,
            unique: false,
        }
    }

    fn assign(conds: Vec<CondTerm>, value: usize) -> Assignment {
        Assignment {
            path: vec![],
            conds,
            value,
            range: TargetRange::Full,
            origin: None,
        }
    }

    fn wire_of(assigns: Vec<Assignment>) -> Netlist {
        Netlist {
            kind: NetlistKind::Wire,
            assigns,
            signed: false,
        }
    }

    #[test]
    fn later_true_condition_wins() {
        // inputs: c0, c1, a, b
        let n = wire_of(vec![assign(vec![cond(0, true)], 2), assign(vec![cond(1, true)], 3)]);
        let ins = [lit("1'b0"), lit("1'b1"), lit("4'd1"), lit("4'd2")];
        assert_eq!(resolve_assignments(&n, &ins, lit("4'd0")), lit("4'd2"));
    }

    #[test]
    fn unknown_condition_merges_alternatives() {
        let n = wire_of(vec![assign(vec![], 1), assign(vec![cond(0, true)], 2)]);
        let ins = [lit("1'bx"), lit("4'b1000"), lit("4'b1010")];
        assert_eq!(resolve_assignments(&n, &ins, lit("4'd0")), lit("4'b10x0"));
    }

    #[test]
    fn no_match_keeps_default() {
        let n = wire_of(vec![assign(vec![cond(0, true)], 1)]);
        let ins = [lit("1'b0"), lit("4'd9")];
        assert_eq!(resolve_assignments(&n, &ins, lit("4'd3")), lit("4'd3"));
    }

    #[test]
    fn unique_unknown_poisons() {
        let mut a = assign(vec![cond(0, true)], 1);
        a.conds[0].unique = true;
        let n = wire_of(vec![a]);
        let ins = [lit("1'bx"), lit("4'd9")];
        assert_eq!(resolve_assignments(&n, &ins, lit("4'd9")), lit("4'bxxxx"));
    }

    #[test]
    fn dynamic_insert_examples() {
        let mut a = assign(vec![], 1);
        a.range = TargetRange::Dynamic { idx: 0, count: 8 };
        let n = wire_of(vec![a]);
        let run = |idx: &str| resolve_assignments(&n, &[lit(idx), lit("8'hFF")], lit("16'h0000"));
        assert_eq!(run("4'd4"), lit("16'h0FF0"));
        assert_eq!(run("4'd12"), lit("16'hF000"));
        assert_eq!(run("4'bx000"), lit("16'hxxxx"));
    }

    #[test]
    fn register_edges() {
        use crate::ir::ResetSpec;
        let n = Netlist {
            kind: NetlistKind::Reg {
                clock: 0,
                edge: EdgeKind::Pos,
                reset: Some(ResetSpec {
                    input: 1,
                    active: false,
                    asynchronous: true,
                }),
            },
            assigns: vec![assign(vec![], 2)],
            signed: false,
        };
        let kind = GateKind::Netlist(Box::new(n));
        let hold = lit("4'd3");
        let init = lit("4'd0");
        let step = |prev: &mut Bit, clk: &str, rst: &str| {
            let ins = [lit(clk), lit(rst), lit("4'd7")];
            full(&kind, &ins, 4, Ctx { hold: &hold, init: &init, prev_clock: prev })
        };
        let mut prev = Bit::Zero;
        assert_eq!(step(&mut prev, "1'b1", "1'b1"), lit("4'd7"));
        assert_eq!(step(&mut prev, "1'b1", "1'b1"), lit("4'd3"));
        assert_eq!(step(&mut prev, "1'b0", "1'b1"), lit("4'd3"));
        assert_eq!(step(&mut prev, "1'bx", "1'b1"), lit("4'b0x11"));
        assert_eq!(step(&mut prev, "1'b0", "1'b0"), lit("4'd0"));
        assert_eq!(step(&mut prev, "1'b0", "1'bx"), lit("4'b00xx"));
    }
}
