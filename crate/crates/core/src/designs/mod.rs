//! Example circuits used by tests, benchmarks, and the command-line tool.

use crate::builder::{Circuit, Instance, Operand, ParamTree, Result, Signal};
use crate::ir::{EnumEncoding, PortDir};
use crate::logic::{CmpOp, Logic, ReduceKind};
use rand::Rng;

/// Adder ports: `x`, `y` in, `out` (one bit wider) out.
#[derive(Debug, Clone, Copy)]
pub struct AdderIo {
    pub x: Signal,
    pub y: Signal,
    pub out: Signal,
}

#[derive(Debug, Clone, Copy)]
pub struct FullAdderIo {
    pub a: Signal,
    pub b: Signal,
    pub cin: Signal,
    pub s: Signal,
    pub cout: Signal,
}

/// Parameter tree giving RippleCarry `w=32` and KoggeStone `w=64`.
pub fn adder_config() -> ParamTree {
    ParamTree::new()
        .child("RippleCarry", |n| n.set("w", 32))
        .child("KoggeStone", |n| n.set("w", 64))
}

/// Parameter tree with the same width for both adders.
pub fn adder_config_width(w: usize) -> ParamTree {
    ParamTree::new().set("w", w as i64)
}

fn adder_io(c: &mut Circuit, w: usize) -> Result<AdderIo> {
    Ok(AdderIo {
        x: c.input("x", w, 0)?,
        y: c.input("y", w, 0)?,
        out: c.output("out", w + 1, 0)?,
    })
}

/// One-bit full adder with inferred ports.
pub fn full_adder(c: &mut Circuit) -> Result<Instance<FullAdderIo>> {
    c.module("FullAdder", |c| {
        let a = c.uint("a", 1, 0)?;
        let b = c.uint("b", 1, 0)?;
        let cin = c.uint("cin", 1, 0)?;
        let ab = c.xor(a, b)?;
        let s = c.xor(ab, cin)?;
        let g = c.and(a, b)?;
        let p = c.and(ab, cin)?;
        let cout = c.or(g, p)?;
        Ok(FullAdderIo {
            a,
            b,
            cin,
            s: c.name(s, "s"),
            cout: c.name(cout, "cout"),
        })
    })
}

/// Chain of `w` full adders; `w` comes from the parameter tree.
pub fn ripple_carry(c: &mut Circuit) -> Result<Instance<AdderIo>> {
    c.module("RippleCarry", |c| {
        let w = c.param_int("w")? as usize;
        let io = adder_io(c, w)?;
        let adders = (0..w).map(|_| full_adder(c).map(|i| i.io)).collect::<Result<Vec<_>>>()?;
        let xs = c.split(io.x)?;
        let ys = c.split(io.y)?;
        for (i, fa) in adders.iter().enumerate() {
            c.assign(fa.a, xs[i])?;
            c.assign(fa.b, ys[i])?;
            let cin: Operand = if i == 0 { 0.into() } else { adders[i - 1].cout.into() };
            c.assign(fa.cin, cin)?;
        }
        let mut parts: Vec<Operand> = adders.iter().map(|fa| fa.s.into()).collect();
        parts.push(adders[w - 1].cout.into());
        let sum = c.cat(&parts)?;
        c.assign(io.out, sum)?;
        Ok(io)
    })
}

/// Parallel-prefix sum of two `w`-bit signals; `w + 1` bits wide.
pub fn kogge_stone_sum(c: &mut Circuit, x: Signal, y: Signal) -> Result<Signal> {
    let w = c.width(x);
    let p_odd = c.xor(x, y)?;
    let mut p = c.split(p_odd)?;
    let xy = c.and(x, y)?;
    let mut g = c.split(xy)?;
    let mut dist = 1;
    while dist < w {
        for i in (dist..w).rev() {
            let t = c.and(p[i], g[i - dist])?;
            g[i] = c.or(g[i], t)?;
            if i >= dist * 2 {
                p[i] = c.and(p[i], p[i - dist])?;
            }
        }
        dist *= 2;
    }
    let mut parts: Vec<Operand> = vec![Operand::Lit(Logic::zeros(1))];
    parts.extend(g.iter().map(|s| Operand::Sig(*s)));
    let carries = c.cat(&parts)?;
    c.xor(carries, p_odd)
}

/// Parallel-prefix adder; `w` comes from the parameter tree.
pub fn kogge_stone(c: &mut Circuit) -> Result<Instance<AdderIo>> {
    c.module("KoggeStone", |c| {
        let w = c.param_int("w")? as usize;
        let io = adder_io(c, w)?;
        let sum = kogge_stone_sum(c, io.x, io.y)?;
        c.assign(io.out, sum)?;
        Ok(io)
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VendingIo {
    pub nickel: Signal,
    pub dime: Signal,
    pub valid: Signal,
    pub state: Signal,
}

pub const VENDING_STATES: [&str; 5] = ["sIdle", "s5", "s10", "s15", "sOk"];

/// Vending machine with a one-hot state register. `valid` is high while
/// the machine sits in `sOk`, which it leaves on the next clock edge.
pub fn vending(c: &mut Circuit) -> Result<Instance<VendingIo>> {
    vending_with(c, EnumEncoding::OneHot)
}

pub fn vending_with(c: &mut Circuit, encoding: EnumEncoding) -> Result<Instance<VendingIo>> {
    c.module("VendingMachine", |c| {
        let nickel = c.input("nickel", 1, 0)?;
        let dime = c.input("dime", 1, 0)?;
        let valid = c.output("valid", 1, 0)?;
        let e = c.new_enum("state", encoding);
        let s = c.reg_enum("s", e)?;
        let table = [
            ("sIdle", "s5", "s10"),
            ("s5", "s10", "s15"),
            ("s10", "s15", "sOk"),
            ("s15", "sOk", "sOk"),
        ];
        c.switch_begin(s, false)?;
        for (from, on_nickel, on_dime) in table {
            c.case_begin(from)?;
            c.when(nickel, |c| c.assign(s, on_nickel))?;
            c.when(dime, |c| c.assign(s, on_dime))?;
        }
        c.case_begin("sOk")?;
        c.assign(s, "sIdle")?;
        c.assign(valid, 1)?;
        c.switch_end()?;
        Ok(VendingIo {
            nickel,
            dime,
            valid,
            state: s,
        })
    })
}

/// Multiplier ports: `a`, `b` in, registered product `p` out.
#[derive(Debug, Clone, Copy)]
pub struct MulIo {
    pub a: Signal,
    pub b: Signal,
    /// Combinational product.
    pub prod: Signal,
    /// Product registered on the default clock.
    pub p: Signal,
}

fn half_adder(c: &mut Circuit, a: Signal, b: Signal) -> Result<(Signal, Signal)> {
    Ok((c.xor(a, b)?, c.and(a, b)?))
}

fn full_add_bits(c: &mut Circuit, a: Signal, b: Signal, cin: Signal) -> Result<(Signal, Signal)> {
    let ab = c.xor(a, b)?;
    let s = c.xor(ab, cin)?;
    let g = c.and(a, b)?;
    let p = c.and(ab, cin)?;
    Ok((s, c.or(g, p)?))
}

/// `w`×`w` Wallace-tree multiplier built from one-bit gates, with a
/// parallel-prefix final adder and a registered output.
pub fn wallace(c: &mut Circuit, w: usize) -> Result<Instance<MulIo>> {
    c.module("Wallace", |c| {
        let a = c.input("a", w, 0)?;
        let b = c.input("b", w, 0)?;
        let p = c.reg_uint("p", 2 * w, 0)?;
        c.mark(p, PortDir::Output);
        let abits = c.split(a)?;
        let bbits = c.split(b)?;
        let mut cols: Vec<Vec<Signal>> = vec![Vec::new(); 2 * w];
        for (i, ai) in abits.iter().enumerate() {
            for (j, bj) in bbits.iter().enumerate() {
                let pp = c.and(*ai, *bj)?;
                cols[i + j].push(pp);
            }
        }
        while cols.iter().any(|col| col.len() > 2) {
            let mut next: Vec<Vec<Signal>> = vec![Vec::new(); 2 * w + 1];
            for (k, col) in cols.iter().enumerate() {
                let mut rest = col.as_slice();
                while rest.len() >= 3 {
                    let (s, co) = full_add_bits(c, rest[0], rest[1], rest[2])?;
                    next[k].push(s);
                    next[k + 1].push(co);
                    rest = &rest[3..];
                }
                if rest.len() == 2 && col.len() > 2 {
                    let (s, co) = half_adder(c, rest[0], rest[1])?;
                    next[k].push(s);
                    next[k + 1].push(co);
                } else {
                    next[k].extend_from_slice(rest);
                }
            }
            next.truncate(2 * w);
            cols = next;
        }
        let zero = Operand::Lit(Logic::zeros(1));
        let row = |c: &mut Circuit, r: usize| -> Result<Signal> {
            let parts: Vec<Operand> = cols
                .iter()
                .map(|col| col.get(r).map_or(zero.clone(), |s| Operand::Sig(*s)))
                .collect();
            c.cat(&parts)
        };
        let r0 = row(c, 0)?;
        let r1 = row(c, 1)?;
        let sum = kogge_stone_sum(c, r0, r1)?;
        let prod = c.select(sum, 0, 2 * w)?;
        c.name(prod, "prod");
        c.assign(p, prod)?;
        Ok(MulIo { a, b, prod, p })
    })
}

/// Ports of a random combinational DAG.
#[derive(Debug, Clone)]
pub struct DagIo {
    pub inputs: Vec<Signal>,
    pub outputs: Vec<Signal>,
}

/// Random combinational DAG of `gates` operators over `inputs` primary
/// inputs of width 1 to 8. Every value produced is recorded as an output.
pub fn random_dag(c: &mut Circuit, rng: &mut impl Rng, inputs: usize, gates: usize) -> Result<DagIo> {
    let mut pool: Vec<Signal> = Vec::new();
    let mut ins = Vec::new();
    for i in 0..inputs {
        let w = rng.gen_range(1..=8);
        let s = c.input(&format!("i{i}"), w, 0)?;
        ins.push(s);
        pool.push(s);
    }
    let mut outs = Vec::new();
    let mut made = 0;
    while made < gates {
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        let wa = c.width(a);
        let out = match rng.gen_range(0..14) {
            0 => c.and(a, b)?,
            1 => c.or(a, b)?,
            2 => c.xor(a, b)?,
            3 => c.not(a)?,
            4 => {
                let s = c.add(a, b)?;
                let w = c.width(s).min(8);
                c.select(s, 0, w)?
            }
            5 => c.sub(a, b)?,
            6 => c.cmp(CmpOp::Lt, a, b)?,
            7 => c.eq(a, b)?,
            8 => {
                let sel = pool[rng.gen_range(0..pool.len())];
                let sel = c.reduce(ReduceKind::Or, sel)?;
                c.mux(sel, a, b)?
            }
            9 => {
                let low = rng.gen_range(0..wa);
                let n = rng.gen_range(1..=wa - low);
                c.select(a, low, n)?
            }
            10 => {
                if wa + c.width(b) > 8 {
                    c.xor(a, b)?
                } else {
                    c.cat(&[a.into(), b.into()])?
                }
            }
            11 => c.reduce(ReduceKind::Xor, a)?,
            12 => {
                // conditional wire over two sources
                let t = c.uint(&format!("w{made}"), wa, 0)?;
                let cond = c.reduce(ReduceKind::And, b)?;
                c.assign(t, a)?;
                c.when_begin(cond)?;
                let na = c.not(a)?;
                c.assign(t, na)?;
                c.when_end()?;
                t
            }
            _ => {
                let m = c.mul(a, b)?;
                let w = c.width(m).min(8);
                c.select(m, 0, w)?
            }
        };
        made += 1;
        pool.push(out);
        outs.push(out);
    }
    for (i, s) in outs.iter().enumerate() {
        c.name(*s, &format!("n{i}"));
    }
    Ok(DagIo { inputs: ins, outputs: outs })
}

#[cfg(test)]
mod tests;
