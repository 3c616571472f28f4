//! Value change dump output for a recorded [`Trace`].

use crate::builder::Design;
use crate::logic::Logic;
use crate::sim::Trace;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

/// Identifier code for variable `i`: base-94 over the printable ASCII range.
pub fn id_code(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'!' + (i % 94) as u8) as char);
        i /= 94;
        if i == 0 {
            break;
        }
        i -= 1;
    }
    s
}

fn value(v: &Logic, id: &str) -> String {
    let bits: String = (0..v.width()).rev().map(|i| v.bit(i).to_char()).collect();
    if v.width() == 1 {
        format!("{bits}{id}")
    } else {
        format!("b{bits} {id}")
    }
}

#[derive(Default)]
struct Scope {
    vars: Vec<(usize, String)>,
    children: BTreeMap<String, Scope>,
}

fn write_scope(out: &mut String, name: &str, s: &Scope, widths: &[usize]) {
    writeln!(out, "$scope module {name} $end").unwrap();
    for (i, n) in &s.vars {
        let w = widths[*i];
        let r = if w > 1 { format!(" [{}:0]", w - 1) } else { String::new() };
        writeln!(out, "$var wire {w} {} {n}{r} $end", id_code(*i)).unwrap();
    }
    for (c, child) in &s.children {
        write_scope(out, c, child, widths);
    }
    out.push_str("$upscope $end\n");
}

/// VCD text for `trace`. Signals sit in scopes named after the module
/// instances that own them, below a root scope `top`. One time unit is one
/// slot; changes within a slot are written in variable order.
pub fn write_vcd(design: &Design, trace: &Trace, top: &str) -> String {
    let g = &design.graph;
    let mut root = Scope::default();
    let mut used: BTreeMap<Vec<String>, HashSet<String>> = BTreeMap::new();
    let mut widths = Vec::new();
    let mut index = BTreeMap::new();
    for (i, s) in trace.signals.iter().enumerate() {
        let data = g.signal(*s);
        widths.push(data.width);
        index.insert(*s, i);
        let path: Vec<String> = data
            .owner
            .map(|m| design.path(m).iter().map(|x| design.module(*x).inst.clone()).collect())
            .unwrap_or_default();
        let base = data.name.clone().unwrap_or_else(|| format!("s{}", s.0));
        let taken = used.entry(path.clone()).or_default();
        let mut name = base.clone();
        let mut k = 1;
        while !taken.insert(name.clone()) {
            name = format!("{base}_{k}");
            k += 1;
        }
        let mut scope = &mut root;
        for p in &path {
            scope = scope.children.entry(p.clone()).or_default();
        }
        scope.vars.push((i, name));
    }

    let mut out = String::new();
    out.push_str("$version hgl $end\n$timescale 1ns $end\n");
    write_scope(&mut out, top, &root, &widths);
    out.push_str("$enddefinitions $end\n");

    let mut initial = trace.initial.clone();
    let mut by_time: BTreeMap<u64, BTreeMap<usize, &Logic>> = BTreeMap::new();
    for (t, s, v) in &trace.changes {
        let i = index[s];
        if *t == 0 {
            initial[i] = v.clone();
        } else {
            by_time.entry(*t).or_default().insert(i, v);
        }
    }
    out.push_str("#0\n$dumpvars\n");
    for (i, v) in initial.iter().enumerate() {
        writeln!(out, "{}", value(v, &id_code(i))).unwrap();
    }
    out.push_str("$end\n");
    for (t, changes) in by_time {
        writeln!(out, "#{t}").unwrap();
        for (i, v) in changes {
            writeln!(out, "{}", value(v, &id_code(i))).unwrap();
        }
    }
    out
}
