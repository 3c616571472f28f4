//! Verilog emission: lowering of the elaborated graph to a small module AST,
//! a structural lint over that AST, and text rendering.

use crate::builder::{CaseLabel, Design, FrameInfo, FrameKind};
use crate::ir::{
    Assignment, EdgeKind, Gate, GateKind, ModuleId, Netlist, NetlistKind, PortDir, SignalId, TargetRange,
};
use crate::logic::{CmpOp, Logic, ReduceKind};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("signal {0} has no width; elaborate the design first")]
    Unfrozen(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ref(String, usize),
    Lit(Logic),
    Param(String, usize),
    HighZ(usize),
    /// `name[low +: count]` of a net `width` bits wide.
    Index { name: String, width: usize, low: usize, count: usize },
    DynIndex { name: String, idx: Box<Expr>, count: usize },
    Unary(&'static str, Box<Expr>),
    Reduce(&'static str, Box<Expr>),
    Binary(&'static str, Box<Expr>, Box<Expr>),
    Compare(&'static str, Box<Expr>, Box<Expr>),
    Signed(Box<Expr>),
    /// Most significant part first.
    Cat(Vec<Expr>),
    Repl(usize, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Self-determined width.
    pub fn width(&self) -> usize {
        match self {
            Expr::Ref(_, w) | Expr::Param(_, w) | Expr::HighZ(w) => *w,
            Expr::Lit(l) => l.width(),
            Expr::Index { count, .. } | Expr::DynIndex { count, .. } => *count,
            Expr::Unary(_, a) | Expr::Signed(a) => a.width(),
            Expr::Reduce(..) | Expr::Compare(..) => 1,
            Expr::Binary(_, a, b) => a.width().max(b.width()),
            Expr::Cat(v) => v.iter().map(Expr::width).sum(),
            Expr::Repl(n, a) => n * a.width(),
            Expr::Cond(_, a, b) => a.width().max(b.width()),
        }
    }

    fn names(&self, out: &mut Vec<String>) {
        match self {
            Expr::Ref(n, _) | Expr::Param(n, _) | Expr::Index { name: n, .. } => out.push(n.clone()),
            Expr::DynIndex { name, idx, .. } => {
                out.push(name.clone());
                idx.names(out);
            }
            Expr::Lit(_) | Expr::HighZ(_) => {}
            Expr::Unary(_, a) | Expr::Reduce(_, a) | Expr::Signed(a) | Expr::Repl(_, a) => a.names(out),
            Expr::Binary(_, a, b) | Expr::Compare(_, a, b) => {
                a.names(out);
                b.names(out);
            }
            Expr::Cat(v) => v.iter().for_each(|e| e.names(out)),
            Expr::Cond(c, a, b) => {
                c.names(out);
                a.names(out);
                b.names(out);
            }
        }
    }

    fn atom(&self) -> bool {
        matches!(
            self,
            Expr::Ref(..) | Expr::Lit(_) | Expr::Param(..) | Expr::HighZ(_) | Expr::Index { .. }
                | Expr::DynIndex { .. } | Expr::Cat(_) | Expr::Repl(..) | Expr::Signed(_)
        )
    }

    fn render(&self) -> String {
        let wrap = |e: &Expr| if e.atom() { e.render() } else { format!("({})", e.render()) };
        match self {
            Expr::Ref(n, _) | Expr::Param(n, _) => n.clone(),
            Expr::Lit(l) => literal(l),
            Expr::HighZ(_) => "'z".to_string(),
            Expr::Index { name, width, low, count } => {
                if *width == 1 {
                    name.clone()
                } else if *count == 1 {
                    format!("{name}[{low}]")
                } else {
                    format!("{name}[{}:{low}]", low + count - 1)
                }
            }
            Expr::DynIndex { name, idx, count } => format!("{name}[{} +: {count}]", idx.render()),
            Expr::Unary(op, a) | Expr::Reduce(op, a) => format!("{op}{}", wrap(a)),
            Expr::Binary(op, a, b) => {
                let side = |e: &Expr| match e {
                    Expr::Binary(o, ..) if o == op && matches!(*op, "&" | "|" | "^" | "+") => e.render(),
                    _ => wrap(e),
                };
                format!("{} {op} {}", side(a), wrap(b))
            }
            Expr::Compare(op, a, b) => format!("{} {op} {}", wrap(a), wrap(b)),
            Expr::Signed(a) => format!("$signed({})", a.render()),
            Expr::Cat(v) => {
                let parts: Vec<String> = v.iter().map(Expr::render).collect();
                format!("{{{}}}", parts.join(", "))
            }
            Expr::Repl(n, a) => format!("{{{n}{{{}}}}}", a.render()),
            Expr::Cond(c, a, b) => format!("{} ? {} : {}", wrap(c), wrap(a), wrap(b)),
        }
    }
}

/// Sized literal: binary when it holds X bits or is at most 8 bits wide,
/// otherwise hexadecimal.
fn literal(l: &Logic) -> String {
    let w = l.width();
    if l.is_all_x() {
        return format!("{w}'bx");
    }
    if l.has_x() || w <= 8 {
        let bits: String = (0..w).rev().map(|i| l.bit(i).to_char()).collect();
        return format!("{w}'b{bits}");
    }
    let words = l.value_plane();
    let digits = w.div_ceil(4);
    let hex: String = (0..digits)
        .rev()
        .map(|d| {
            let nib = (words[d * 4 / 64] >> (d * 4 % 64)) & 0xF;
            char::from_digit(nib as u32, 16).unwrap()
        })
        .collect();
    format!("{w}'h{hex}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LRange {
    Full,
    Static { low: usize, count: usize },
    Dynamic { idx: Expr, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lvalue {
    pub name: String,
    /// Width of the whole net.
    pub width: usize,
    pub range: LRange,
}

impl Lvalue {
    pub fn width(&self) -> usize {
        match &self.range {
            LRange::Full => self.width,
            LRange::Static { count, .. } | LRange::Dynamic { count, .. } => *count,
        }
    }

    fn render(&self) -> String {
        match &self.range {
            LRange::Full => self.name.clone(),
            LRange::Static { low, count } => Expr::Index {
                name: self.name.clone(),
                width: self.width,
                low: *low,
                count: *count,
            }
            .render(),
            LRange::Dynamic { idx, count } => format!("{}[{} +: {count}]", self.name, idx.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign { lhs: Lvalue, rhs: Expr, nonblocking: bool },
    If { cond: Expr, then: Vec<Stmt>, els: Vec<Stmt> },
    Case {
        keyword: &'static str,
        subject: Expr,
        arms: Vec<(Vec<String>, Vec<Stmt>)>,
        default: Option<Vec<Stmt>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Assign { lhs: Lvalue, rhs: Expr },
    Always { sens: String, body: Vec<Stmt> },
    Inst { module: String, name: String, conns: Vec<(String, Expr)> },
}

/// One emitted module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerilogUnit {
    pub name: String,
    pub ports: Vec<(String, PortDir, usize)>,
    pub params: Vec<(String, Logic)>,
    pub decls: Vec<(String, usize)>,
    pub items: Vec<Item>,
}

fn range(w: usize) -> String {
    if w == 1 {
        String::new()
    } else {
        format!("[{}:0] ", w - 1)
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn render_block(out: &mut String, body: &[Stmt], depth: usize) {
    for s in body {
        render_stmt(out, s, depth);
    }
}

fn render_stmt(out: &mut String, s: &Stmt, depth: usize) {
    match s {
        Stmt::Assign { lhs, rhs, nonblocking } => {
            indent(out, depth);
            let op = if *nonblocking { "<=" } else { "=" };
            writeln!(out, "{} {op} {};", lhs.render(), rhs.render()).unwrap();
        }
        Stmt::If { cond, then, els } => {
            indent(out, depth);
            writeln!(out, "if ({}) begin", cond.render()).unwrap();
            render_block(out, then, depth + 1);
            let mut els = els;
            loop {
                indent(out, depth);
                match els.as_slice() {
                    [] => {
                        out.push_str("end\n");
                        break;
                    }
                    [Stmt::If { cond, then, els: rest }] => {
                        writeln!(out, "end else if ({}) begin", cond.render()).unwrap();
                        render_block(out, then, depth + 1);
                        els = rest;
                    }
                    other => {
                        out.push_str("end else begin\n");
                        render_block(out, other, depth + 1);
                        indent(out, depth);
                        out.push_str("end\n");
                        break;
                    }
                }
            }
        }
        Stmt::Case { keyword, subject, arms, default } => {
            indent(out, depth);
            writeln!(out, "{keyword} ({})", subject.render()).unwrap();
            let arm = |out: &mut String, label: &str, body: &[Stmt]| {
                indent(out, depth + 1);
                writeln!(out, "{label}: begin").unwrap();
                render_block(out, body, depth + 2);
                indent(out, depth + 1);
                out.push_str("end\n");
            };
            for (labels, body) in arms {
                arm(out, &labels.join(", "), body);
            }
            if let Some(d) = default {
                arm(out, "default", d);
            }
            indent(out, depth);
            out.push_str("endcase\n");
        }
    }
}

impl VerilogUnit {
    fn render_body(&self) -> String {
        let mut out = String::new();
        for (i, (n, dir, w)) in self.ports.iter().enumerate() {
            let d = match dir {
                PortDir::Input => "input ",
                PortDir::Output => "output",
            };
            let sep = if i + 1 < self.ports.len() { "," } else { "" };
            writeln!(out, "  {d} logic {}{n}{sep}", range(*w)).unwrap();
        }
        out.push_str(");\n");
        for (n, v) in &self.params {
            writeln!(out, "  localparam logic {}{n} = {};", range(v.width()), literal(v)).unwrap();
        }
        for (n, w) in &self.decls {
            writeln!(out, "  logic {}{n};", range(*w)).unwrap();
        }
        for item in &self.items {
            match item {
                Item::Assign { lhs, rhs } => {
                    writeln!(out, "  assign {} = {};", lhs.render(), rhs.render()).unwrap();
                }
                Item::Always { sens, body } => {
                    if sens == "*" {
                        out.push_str("  always @* begin\n");
                    } else {
                        writeln!(out, "  always @({sens}) begin").unwrap();
                    }
                    render_block(&mut out, body, 2);
                    out.push_str("  end\n");
                }
                Item::Inst { module, name, conns } => {
                    writeln!(out, "  {module} {name} (").unwrap();
                    for (i, (p, e)) in conns.iter().enumerate() {
                        let sep = if i + 1 < conns.len() { "," } else { "" };
                        writeln!(out, "    .{p}({}){sep}", e.render()).unwrap();
                    }
                    out.push_str("  );\n");
                }
            }
        }
        out.push_str("endmodule\n");
        out
    }

    pub fn render(&self) -> String {
        format!("module {} (\n{}", self.name, self.render_body())
    }

    fn widths(&self) -> HashMap<&str, usize> {
        let mut m = HashMap::new();
        for (n, _, w) in &self.ports {
            m.insert(n.as_str(), *w);
        }
        for (n, w) in &self.decls {
            m.insert(n.as_str(), *w);
        }
        for (n, v) in &self.params {
            m.insert(n.as_str(), v.width());
        }
        m
    }

    /// Structural checks: identifiers declared exactly once and before
    /// use, at most one driver per net, no driven inputs, and matching
    /// widths on both sides of every assignment and port connection.
    pub fn lint(&self, units: &[VerilogUnit]) -> Vec<String> {
        let mut out = Vec::new();
        let name = &self.name;
        let mut seen = HashSet::new();
        let declared = self
            .ports
            .iter()
            .map(|p| &p.0)
            .chain(self.params.iter().map(|p| &p.0))
            .chain(self.decls.iter().map(|d| &d.0))
            .chain(self.items.iter().filter_map(|i| match i {
                Item::Inst { name, .. } => Some(name),
                _ => None,
            }));
        for d in declared {
            if !seen.insert(d.as_str()) {
                out.push(format!("{name}: `{d}` declared more than once"));
            }
        }
        let widths = self.widths();
        let inputs: HashSet<&str> = self
            .ports
            .iter()
            .filter(|p| p.1 == PortDir::Input)
            .map(|p| p.0.as_str())
            .collect();
        let mut drivers: BTreeMap<String, usize> = BTreeMap::new();
        let mut refs = Vec::new();
        let check_width = |what: String, l: usize, r: usize, out: &mut Vec<String>| {
            if l != r {
                out.push(format!("{name}: width mismatch in {what}: {l} vs {r}"));
            }
        };
        for item in &self.items {
            match item {
                Item::Assign { lhs, rhs } => {
                    *drivers.entry(lhs.name.clone()).or_default() += 1;
                    lvalue_names(lhs, &mut refs);
                    rhs.names(&mut refs);
                    check_width(format!("assign {}", lhs.name), lhs.width(), rhs.width(), &mut out);
                }
                Item::Always { body, .. } => {
                    let mut targets = BTreeSet::new();
                    let mut stmts: Vec<&Stmt> = body.iter().collect();
                    while let Some(s) = stmts.pop() {
                        match s {
                            Stmt::Assign { lhs, rhs, .. } => {
                                targets.insert(lhs.name.clone());
                                lvalue_names(lhs, &mut refs);
                                rhs.names(&mut refs);
                                if !matches!(rhs, Expr::HighZ(_)) {
                                    check_width(format!("always {}", lhs.name), lhs.width(), rhs.width(), &mut out);
                                }
                            }
                            Stmt::If { cond, then, els } => {
                                cond.names(&mut refs);
                                stmts.extend(then.iter().chain(els.iter()));
                            }
                            Stmt::Case { subject, arms, default, .. } => {
                                subject.names(&mut refs);
                                for (labels, body) in arms {
                                    refs.extend(labels.iter().filter(|l| !l.contains('\'')).cloned());
                                    stmts.extend(body.iter());
                                }
                                stmts.extend(default.iter().flatten());
                            }
                        }
                    }
                    for t in targets {
                        *drivers.entry(t).or_default() += 1;
                    }
                }
                Item::Inst { module, name: inst, conns } => {
                    let Some(child) = units.iter().find(|u| &u.name == module) else {
                        out.push(format!("{name}: instance {inst} of unknown module {module}"));
                        continue;
                    };
                    for (p, e) in conns {
                        e.names(&mut refs);
                        let Some((_, dir, w)) = child.ports.iter().find(|q| &q.0 == p) else {
                            out.push(format!("{name}: {module} has no port {p}"));
                            continue;
                        };
                        check_width(format!("{inst}.{p}"), *w, e.width(), &mut out);
                        if *dir == PortDir::Output {
                            match e {
                                Expr::Ref(n, _) => *drivers.entry(n.clone()).or_default() += 1,
                                _ => out.push(format!("{name}: output {inst}.{p} not connected to a net")),
                            }
                        }
                    }
                }
            }
        }
        for r in refs {
            if !widths.contains_key(r.as_str()) {
                out.push(format!("{name}: `{r}` used but not declared"));
            }
        }
        for (n, k) in drivers {
            if k > 1 {
                out.push(format!("{name}: `{n}` has {k} drivers"));
            }
            if inputs.contains(n.as_str()) {
                out.push(format!("{name}: input `{n}` is driven"));
            }
        }
        out
    }
}

/// Drops continuous assignments to locals nothing reads, such as case
/// match wires once the switch is emitted as a `case`.
fn prune(decls: &mut Vec<(String, usize)>, items: &mut Vec<Item>) {
    loop {
        let mut read: HashSet<String> = HashSet::new();
        for item in items.iter() {
            let mut v = Vec::new();
            match item {
                Item::Assign { lhs, rhs } => {
                    if let LRange::Dynamic { idx, .. } = &lhs.range {
                        idx.names(&mut v);
                    }
                    rhs.names(&mut v);
                }
                Item::Always { sens, body } => {
                    v.extend(sens.split_whitespace().map(str::to_string));
                    let mut stmts: Vec<&Stmt> = body.iter().collect();
                    while let Some(s) = stmts.pop() {
                        match s {
                            Stmt::Assign { lhs, rhs, .. } => {
                                if let LRange::Dynamic { idx, .. } = &lhs.range {
                                    idx.names(&mut v);
                                }
                                rhs.names(&mut v);
                            }
                            Stmt::If { cond, then, els } => {
                                cond.names(&mut v);
                                stmts.extend(then.iter().chain(els.iter()));
                            }
                            Stmt::Case { subject, arms, default, .. } => {
                                subject.names(&mut v);
                                for (labels, body) in arms {
                                    v.extend(labels.iter().cloned());
                                    stmts.extend(body.iter());
                                }
                                stmts.extend(default.iter().flatten());
                            }
                        }
                    }
                }
                Item::Inst { conns, .. } => conns.iter().for_each(|(_, e)| e.names(&mut v)),
            }
            read.extend(v);
        }
        let dead: HashSet<String> = decls
            .iter()
            .filter(|(n, _)| !read.contains(n))
            .map(|(n, _)| n.clone())
            .filter(|n| {
                !items.iter().any(|i| match i {
                    Item::Inst { conns, .. } => conns.iter().any(|(_, e)| matches!(e, Expr::Ref(r, _) if r == n)),
                    _ => false,
                })
            })
            .collect();
        let before = items.len();
        items.retain(|i| !matches!(i, Item::Assign { lhs, .. } if dead.contains(&lhs.name)));
        if items.len() == before {
            return;
        }
        decls.retain(|(n, _)| !dead.contains(n) || items.iter().any(|i| drives(i, n)));
    }
}

fn drives(i: &Item, n: &str) -> bool {
    match i {
        Item::Assign { lhs, .. } => lhs.name == n,
        Item::Always { body, .. } => {
            let mut stmts: Vec<&Stmt> = body.iter().collect();
            while let Some(s) = stmts.pop() {
                match s {
                    Stmt::Assign { lhs, .. } if lhs.name == n => return true,
                    Stmt::Assign { .. } => {}
                    Stmt::If { then, els, .. } => stmts.extend(then.iter().chain(els.iter())),
                    Stmt::Case { arms, default, .. } => {
                        stmts.extend(arms.iter().flat_map(|a| a.1.iter()));
                        stmts.extend(default.iter().flatten());
                    }
                }
            }
            false
        }
        Item::Inst { .. } => false,
    }
}

fn lvalue_names(l: &Lvalue, out: &mut Vec<String>) {
    out.push(l.name.clone());
    if let LRange::Dynamic { idx, .. } = &l.range {
        idx.names(out);
    }
}

/// Emitted modules, children before parents, top last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verilog {
    pub units: Vec<VerilogUnit>,
}

impl Verilog {
    pub fn render(&self) -> String {
        let texts: Vec<String> = self.units.iter().map(VerilogUnit::render).collect();
        texts.join("\n")
    }

    pub fn lint(&self) -> Vec<String> {
        self.units.iter().flat_map(|u| u.lint(&self.units)).collect()
    }
}

const KEYWORDS: &[&str] = &[
    "always", "and", "assign", "begin", "buf", "case", "casex", "casez", "default", "else", "end",
    "endcase", "endmodule", "for", "if", "initial", "inout", "input", "integer", "localparam", "logic",
    "module", "nand", "negedge", "nor", "not", "or", "output", "parameter", "posedge", "reg", "signed",
    "unique", "wire", "xnor", "xor",
];

#[derive(Default)]
struct Names {
    used: HashSet<String>,
}

impl Names {
    fn take(&mut self, base: &str) -> String {
        let mut base: String = base
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        if base.is_empty() || base.starts_with(|c: char| c.is_ascii_digit()) {
            base.insert(0, '_');
        }
        if KEYWORDS.contains(&base.as_str()) {
            base.push('_');
        }
        let mut name = base.clone();
        let mut k = 1;
        while self.used.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        name
    }
}

struct Emitter<'d> {
    d: &'d Design,
    scope: Vec<Option<ModuleId>>,
    ports: Vec<Vec<(SignalId, PortDir)>>,
    top_ports: Vec<(SignalId, PortDir)>,
}

/// Scope in which each signal is declared, and every module's ports.
impl<'d> Emitter<'d> {
    fn new(d: &'d Design) -> Result<Emitter<'d>, EmitError> {
        let g = &d.graph;
        for s in g.signals() {
            if s.width == 0 {
                return Err(EmitError::Unfrozen(s.id.0));
            }
        }
        let scope = g.signals().iter().map(|s| d.scope_of(s.id)).collect();
        let ports = d
            .modules
            .iter()
            .map(|m| m.ports.iter().map(|p| (p.signal, p.dir)).collect())
            .collect();
        let mut top_ports = Vec::new();
        for s in g.signals() {
            if s.is_const || d.scope_of(s.id).is_some() {
                continue;
            }
            let used = s.writer.is_some() || !s.readers.is_empty();
            if !used {
                continue;
            }
            if s.writer.is_none() {
                top_ports.push((s.id, PortDir::Input));
            } else if s.mark == Some(PortDir::Output) || (s.name.is_some() && s.readers.is_empty()) {
                top_ports.push((s.id, PortDir::Output));
            }
        }
        Ok(Emitter { d, scope, ports, top_ports })
    }

    fn gates_in(&self, m: Option<ModuleId>) -> Vec<&'d Gate> {
        self.d.graph.gates().iter().filter(|g| g.location == m).collect()
    }

    fn children(&self, m: Option<ModuleId>) -> Vec<ModuleId> {
        match m {
            Some(m) => self.d.module(m).children.clone(),
            None => self.d.roots(),
        }
    }

    fn module_ports(&self, m: Option<ModuleId>) -> &[(SignalId, PortDir)] {
        match m {
            Some(m) => &self.ports[m.index()],
            None => &self.top_ports,
        }
    }

    /// Unit for `m` (its name left empty) and the port names it chose.
    fn unit(&self, m: Option<ModuleId>, done: &HashMap<ModuleId, Emitted>) -> (VerilogUnit, Vec<(SignalId, String)>) {
        let g = &self.d.graph;
        let gates = self.gates_in(m);
        let children = self.children(m);
        let mut names = Names::default();

        // enum states used here become localparams
        let mut enums = BTreeSet::new();
        let mut touched: BTreeSet<SignalId> = BTreeSet::new();
        for gate in &gates {
            touched.extend(gate.inputs.iter().chain(&gate.outputs).map(|e| e.signal));
            if let GateKind::Netlist(n) = &gate.kind {
                for f in self.frames_of(n) {
                    if let FrameKind::Switch { subject, .. } = &f.kind {
                        touched.insert(*subject);
                    }
                }
            }
        }
        touched.extend(self.module_ports(m).iter().map(|p| p.0));
        for s in &touched {
            if let Some(e) = g.signal(*s).ty.enum_id() {
                enums.insert(e);
            }
        }
        let mut params = Vec::new();
        let mut state_names: HashMap<(u32, usize), String> = HashMap::new();
        for e in enums {
            let def = &self.d.enums[e.0 as usize];
            for (i, st) in def.states().iter().enumerate() {
                let n = names.take(st);
                params.push((n.clone(), def.code(i)));
                state_names.insert((e.0, i), n);
            }
        }

        let mut net: BTreeMap<SignalId, String> = BTreeMap::new();
        let mut ports = Vec::new();
        let mut port_names = Vec::new();
        let mut port_list: Vec<(SignalId, PortDir)> = self.module_ports(m).to_vec();
        port_list.sort();
        for (s, dir) in &port_list {
            let n = names.take(&self.hint(*s));
            ports.push((n.clone(), *dir, g.signal(*s).width));
            port_names.push((*s, n.clone()));
            net.insert(*s, n);
        }
        let mut visible: BTreeSet<SignalId> = BTreeSet::new();
        for gate in &gates {
            visible.extend(gate.inputs.iter().chain(&gate.outputs).map(|e| e.signal));
        }
        for c in &children {
            visible.extend(self.ports[c.index()].iter().map(|p| p.0));
        }
        let inline: HashSet<SignalId> = visible
            .iter()
            .copied()
            .filter(|s| !net.contains_key(s) && self.scope[s.index()] == m && self.inlinable(*s))
            .collect();
        let mut decls = Vec::new();
        for s in visible {
            let data = g.signal(s);
            if data.is_const || net.contains_key(&s) || inline.contains(&s) || self.scope[s.index()] != m {
                continue;
            }
            let n = names.take(&self.hint(s));
            decls.push((n.clone(), data.width));
            net.insert(s, n);
        }
        let mut inst_names = Vec::new();
        for c in &children {
            inst_names.push(names.take(&self.d.module(*c).inst));
        }

        let mut cx = Lower {
            e: self,
            net,
            inline,
            state_names,
            names,
            extra: Vec::new(),
            extra_items: Vec::new(),
        };
        let mut items = Vec::new();
        for gate in &gates {
            if !cx.inline.contains(&gate.outputs[0].signal) {
                items.extend(cx.gate(gate));
            }
        }
        for (c, inst) in children.iter().zip(inst_names) {
            let child = &done[c];
            let conns = child.ports.iter().map(|(s, pn)| (pn.clone(), cx.operand(*s))).collect();
            items.push(Item::Inst {
                module: child.name.clone(),
                name: inst,
                conns,
            });
        }
        decls.extend(cx.extra);
        let mut all = cx.extra_items;
        all.extend(items);
        prune(&mut decls, &mut all);
        let u = VerilogUnit {
            name: String::new(),
            ports,
            params,
            decls,
            items: all,
        };
        (u, port_names)
    }

    fn frames_of(&self, n: &Netlist) -> Vec<&'d FrameInfo> {
        let mut ids: Vec<u32> = n.assigns.iter().flat_map(|a| a.path.iter().map(|c| c.frame.0)).collect();
        ids.sort();
        ids.dedup();
        ids.into_iter().map(|i| &self.d.frames[i as usize]).collect()
    }

    /// Unnamed, untracked result of an expression gate with a single reader
    /// that only uses it as a whole operand.
    fn inlinable(&self, s: SignalId) -> bool {
        let g = &self.d.graph;
        let data = g.signal(s);
        let Some(w) = &data.writer else { return false };
        if data.name.is_some() || data.tracked || data.is_const || data.readers.len() != 1 {
            return false;
        }
        let writer = g.gate(w.gate);
        if matches!(writer.kind, GateKind::Netlist(_) | GateKind::MemRead { .. } | GateKind::Tri) {
            return false;
        }
        let reader = g.gate(data.readers[0].gate);
        if let GateKind::Netlist(n) = &reader.kind {
            return reader.location == writer.location
                && n.kind == NetlistKind::Wire
                && matches!(n.assigns.as_slice(), [a] if a.conds.is_empty() && a.range == TargetRange::Full);
        }
        reader.location == writer.location
            && matches!(
                reader.kind,
                GateKind::Not
                    | GateKind::And
                    | GateKind::Or
                    | GateKind::Xor
                    | GateKind::Reduce(_)
                    | GateKind::Cmp { .. }
                    | GateKind::Cat
                    | GateKind::Mux
                    | GateKind::Match(_)
                    | GateKind::Div
                    | GateKind::Rem
                    | GateKind::Add { signed: false }
                    | GateKind::Sub { signed: false }
                    | GateKind::Mul { signed: false }
            )
    }

    fn hint(&self, s: SignalId) -> String {
        self.d.graph.signal(s).name.clone().unwrap_or_else(|| "t".to_string())
    }
}

struct Emitted {
    name: String,
    ports: Vec<(SignalId, String)>,
}

struct Lower<'a, 'd> {
    e: &'a Emitter<'d>,
    net: BTreeMap<SignalId, String>,
    /// Values folded into the expression of their only reader.
    inline: HashSet<SignalId>,
    state_names: HashMap<(u32, usize), String>,
    names: Names,
    extra: Vec<(String, usize)>,
    extra_items: Vec<Item>,
}

fn cmp_op(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "==",
        CmpOp::Ne => "!=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
    }
}

fn reduce_op(k: ReduceKind) -> &'static str {
    match k {
        ReduceKind::And => "&",
        ReduceKind::Or => "|",
        ReduceKind::Xor => "^",
    }
}

impl Lower<'_, '_> {
    fn width(&self, s: SignalId) -> usize {
        self.e.d.graph.signal(s).width
    }

    fn constant(&self, s: SignalId) -> Option<Expr> {
        let data = self.e.d.graph.signal(s);
        if !data.is_const {
            return None;
        }
        Some(self.value_of(s, data.init_value()))
    }

    /// `v` as a state name when `s` is enum-typed and `v` is one of its
    /// codes.
    fn value_of(&self, s: SignalId, v: Logic) -> Expr {
        if let Some(e) = self.e.d.graph.signal(s).ty.enum_id() {
            let def = &self.e.d.enums[e.0 as usize];
            if let Some(i) = (0..def.states().len()).find(|i| def.code(*i) == v) {
                if let Some(n) = self.state_names.get(&(e.0, i)) {
                    return Expr::Param(n.clone(), v.width());
                }
            }
        }
        Expr::Lit(v)
    }

    fn operand(&mut self, s: SignalId) -> Expr {
        if self.inline.contains(&s) {
            let w = self.e.d.graph.signal(s).writer.as_ref().expect("driven").gate;
            return self.expr(self.e.d.graph.gate(w));
        }
        match self.constant(s) {
            Some(c) => c,
            None => Expr::Ref(self.net[&s].clone(), self.width(s)),
        }
    }

    /// Name of a net holding `s`, adding one for constants.
    fn net_name(&mut self, s: SignalId) -> String {
        if let Some(n) = self.net.get(&s) {
            return n.clone();
        }
        let c = self.constant(s).expect("constant");
        let w = self.width(s);
        let n = self.names.take("k");
        self.extra.push((n.clone(), w));
        self.extra_items.push(Item::Assign {
            lhs: Lvalue {
                name: n.clone(),
                width: w,
                range: LRange::Full,
            },
            rhs: c,
        });
        self.net.insert(s, n.clone());
        n
    }

    fn index(&mut self, s: SignalId, low: usize, count: usize) -> Expr {
        let w = self.width(s);
        if low == 0 && count == w {
            return self.operand(s);
        }
        if let Some(Expr::Lit(l)) = self.constant(s) {
            return Expr::Lit(l.select(low, count));
        }
        Expr::Index {
            name: self.net_name(s),
            width: w,
            low,
            count,
        }
    }

    fn ext(&mut self, s: SignalId, to: usize, signed: bool) -> Expr {
        let w = self.width(s);
        if let Some(Expr::Lit(l)) = self.constant(s) {
            return Expr::Lit(l.resize(to, signed));
        }
        if to <= w {
            return self.index(s, 0, to);
        }
        let fill = if signed {
            Expr::Repl(to - w, Box::new(self.index(s, w - 1, 1)))
        } else {
            Expr::Lit(Logic::zeros(to - w))
        };
        Expr::Cat(vec![fill, self.operand(s)])
    }

    fn lhs(&self, s: SignalId) -> Lvalue {
        Lvalue {
            name: self.net[&s].clone(),
            width: self.width(s),
            range: LRange::Full,
        }
    }

    fn gate(&mut self, gate: &Gate) -> Vec<Item> {
        let out = gate.outputs[0].signal;
        let ow = self.width(out);
        let ins: Vec<SignalId> = gate.inputs.iter().map(|e| e.signal).collect();
        match &gate.kind {
            GateKind::MemRead { depth } => {
                let aw = self.width(ins[0]);
                let arms = (0..*depth)
                    .map(|i| {
                        let label = literal(&Logic::from_u64(aw, i as u64));
                        let body = vec![Stmt::Assign {
                            lhs: self.lhs(out),
                            rhs: self.operand(ins[1 + i]),
                            nonblocking: false,
                        }];
                        (vec![label], body)
                    })
                    .collect();
                let default = Some(vec![Stmt::Assign {
                    lhs: self.lhs(out),
                    rhs: Expr::Lit(Logic::unknown(ow)),
                    nonblocking: false,
                }]);
                let subject = self.operand(ins[0]);
                vec![Item::Always {
                    sens: "*".to_string(),
                    body: vec![Stmt::Case {
                        keyword: "case",
                        subject,
                        arms,
                        default,
                    }],
                }]
            }
            GateKind::Netlist(n) => self.netlist(gate, n),
            _ => {
                let rhs = self.expr(gate);
                vec![Item::Assign { lhs: self.lhs(out), rhs }]
            }
        }
    }

    /// Expression computing an expression gate's output.
    fn expr(&mut self, gate: &Gate) -> Expr {
        let out = gate.outputs[0].signal;
        let ow = self.width(out);
        let ins: Vec<SignalId> = gate.inputs.iter().map(|e| e.signal).collect();
        let bx = Box::new;
        match &gate.kind {
            GateKind::Not => Expr::Unary("~", bx(self.operand(ins[0]))),
            GateKind::And | GateKind::Or | GateKind::Xor => {
                let op = match gate.kind {
                    GateKind::And => "&",
                    GateKind::Or => "|",
                    _ => "^",
                };
                Expr::Binary(op, bx(self.operand(ins[0])), bx(self.operand(ins[1])))
            }
            GateKind::Reduce(k) => Expr::Reduce(reduce_op(*k), bx(self.operand(ins[0]))),
            GateKind::Add { signed } | GateKind::Sub { signed } | GateKind::Mul { signed } => {
                let op = match gate.kind {
                    GateKind::Add { .. } => "+",
                    GateKind::Sub { .. } => "-",
                    _ => "*",
                };
                Expr::Binary(op, bx(self.ext(ins[0], ow, *signed)), bx(self.ext(ins[1], ow, *signed)))
            }
            GateKind::Div => Expr::Binary("/", bx(self.operand(ins[0])), bx(self.operand(ins[1]))),
            GateKind::Rem => Expr::Binary("%", bx(self.operand(ins[0])), bx(self.operand(ins[1]))),
            GateKind::Cmp { op, signed } => {
                let relational = !matches!(op, CmpOp::Eq | CmpOp::Ne);
                let side = |e: Expr| if *signed && relational { Expr::Signed(bx(e)) } else { e };
                Expr::Compare(cmp_op(*op), bx(side(self.operand(ins[0]))), bx(side(self.operand(ins[1]))))
            }
            GateKind::Cat => Expr::Cat(ins.iter().rev().map(|s| self.operand(*s)).collect()),
            GateKind::Select { low, count } => {
                let w = self.width(ins[0]);
                let avail = (*count).min(w.saturating_sub(*low));
                if avail == 0 {
                    Expr::Lit(Logic::unknown(*count))
                } else if avail < *count {
                    Expr::Cat(vec![Expr::Lit(Logic::unknown(count - avail)), self.index(ins[0], *low, avail)])
                } else {
                    self.index(ins[0], *low, *count)
                }
            }
            GateKind::DynSelect { count } => Expr::DynIndex {
                name: self.net_name(ins[0]),
                idx: bx(self.operand(ins[1])),
                count: *count,
            },
            GateKind::Resize { width, signed } => self.ext(ins[0], *width, *signed),
            GateKind::Match(p) => Expr::Compare(
                "==",
                bx(Expr::Binary("&", bx(self.operand(ins[0])), bx(Expr::Lit(p.care().clone())))),
                bx(Expr::Lit(p.value().clone())),
            ),
            GateKind::Mux => Expr::Cond(
                bx(self.operand(ins[0])),
                bx(self.operand(ins[2])),
                bx(self.operand(ins[1])),
            ),
            GateKind::Tri => Expr::Cond(bx(self.operand(ins[0])), bx(self.operand(ins[1])), bx(Expr::HighZ(ow))),
            GateKind::MemRead { .. } | GateKind::Netlist(_) => unreachable!("not an expression gate"),
        }
    }

    fn netlist(&mut self, gate: &Gate, n: &Netlist) -> Vec<Item> {
        let out = gate.outputs[0].signal;
        let ins: Vec<SignalId> = gate.inputs.iter().map(|e| e.signal).collect();
        let init = self.e.d.graph.signal(out).init_value();
        match &n.kind {
            NetlistKind::Wire => {
                if let [a] = n.assigns.as_slice() {
                    if a.conds.is_empty() && a.range == TargetRange::Full {
                        return vec![Item::Assign {
                            lhs: self.lhs(out),
                            rhs: self.operand(ins[a.value]),
                        }];
                    }
                }
                let refs: Vec<&Assignment> = n.assigns.iter().collect();
                let mut body = Vec::new();
                let covered = refs
                    .first()
                    .is_some_and(|a| a.conds.is_empty() && a.range == TargetRange::Full);
                if !covered {
                    body.push(Stmt::Assign {
                        lhs: self.lhs(out),
                        rhs: self.value_of(out, init),
                        nonblocking: false,
                    });
                }
                body.extend(self.block(out, &ins, &refs, 0, false));
                vec![Item::Always {
                    sens: "*".to_string(),
                    body,
                }]
            }
            NetlistKind::Latch { enable, active } => {
                let refs: Vec<&Assignment> = n.assigns.iter().collect();
                let body = self.block(out, &ins, &refs, 0, false);
                let en = self.operand(ins[*enable]);
                let cond = if *active { en } else { Expr::Unary("!", Box::new(en)) };
                vec![Item::Always {
                    sens: "*".to_string(),
                    body: vec![Stmt::If {
                        cond,
                        then: body,
                        els: Vec::new(),
                    }],
                }]
            }
            NetlistKind::Reg { clock, edge, reset } => {
                let refs: Vec<&Assignment> = n.assigns.iter().collect();
                let load = self.block(out, &ins, &refs, 0, true);
                let edge_word = |e: EdgeKind| match e {
                    EdgeKind::Pos => "posedge",
                    EdgeKind::Neg => "negedge",
                };
                let clk = self.net_name(ins[*clock]);
                let mut sens = format!("{} {clk}", edge_word(*edge));
                let body = match reset {
                    Some(r) => {
                        let rn = self.net_name(ins[r.input]);
                        if r.asynchronous {
                            let e = if r.active { EdgeKind::Pos } else { EdgeKind::Neg };
                            write!(sens, " or {} {rn}", edge_word(e)).unwrap();
                        }
                        let rref = self.operand(ins[r.input]);
                        let cond = if r.active { rref } else { Expr::Unary("!", Box::new(rref)) };
                        vec![Stmt::If {
                            cond,
                            then: vec![Stmt::Assign {
                                lhs: self.lhs(out),
                                rhs: self.value_of(out, init),
                                nonblocking: true,
                            }],
                            els: load,
                        }]
                    }
                    None => load,
                };
                vec![Item::Always { sens, body }]
            }
        }
    }

    fn assign_stmt(&mut self, out: SignalId, ins: &[SignalId], a: &Assignment, nb: bool) -> Stmt {
        let w = self.width(out);
        let range = match &a.range {
            TargetRange::Full => LRange::Full,
            TargetRange::Static { low, count } => LRange::Static { low: *low, count: *count },
            TargetRange::Dynamic { idx, count } => LRange::Dynamic {
                idx: self.operand(ins[*idx]),
                count: *count,
            },
        };
        Stmt::Assign {
            lhs: Lvalue {
                name: self.net[&out].clone(),
                width: w,
                range,
            },
            rhs: self.operand(ins[a.value]),
            nonblocking: nb,
        }
    }

    /// Statements for `assigns`, all of which share the first `depth`
    /// frames of their condition paths.
    fn block(&mut self, out: SignalId, ins: &[SignalId], assigns: &[&Assignment], depth: usize, nb: bool) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        let mut i = 0;
        while i < assigns.len() {
            let a = assigns[i];
            if a.path.len() <= depth {
                if depth == 0 && !a.conds.is_empty() {
                    // no recorded frames; guard with the raw condition terms
                    let s = self.assign_stmt(out, ins, a, nb);
                    stmts.push(self.guarded(ins, a, s));
                } else {
                    stmts.push(self.assign_stmt(out, ins, a, nb));
                }
                i += 1;
                continue;
            }
            let frame = a.path[depth].frame;
            let mut j = i;
            while j < assigns.len() && assigns[j].path.len() > depth && assigns[j].path[depth].frame == frame {
                j += 1;
            }
            let mut branches: BTreeMap<usize, Vec<&Assignment>> = BTreeMap::new();
            for b in &assigns[i..j] {
                branches.entry(b.path[depth].branch).or_default().push(b);
            }
            let mut bodies: BTreeMap<usize, Vec<Stmt>> = BTreeMap::new();
            for (k, v) in branches {
                bodies.insert(k, self.block(out, ins, &v, depth + 1, nb));
            }
            let e = self.e;
            stmts.push(self.frame_stmt(&e.d.frames[frame.0 as usize], bodies));
            i = j;
        }
        stmts
    }

    fn guarded(&mut self, ins: &[SignalId], a: &Assignment, s: Stmt) -> Stmt {
        let terms: Vec<Expr> = a
            .conds
            .iter()
            .map(|t| {
                let e = self.operand(ins[t.input]);
                if t.polarity { e } else { Expr::Unary("!", Box::new(e)) }
            })
            .collect();
        let cond = terms
            .into_iter()
            .reduce(|x, y| Expr::Binary("&&", Box::new(x), Box::new(y)))
            .expect("non-empty");
        Stmt::If {
            cond,
            then: vec![s],
            els: Vec::new(),
        }
    }

    fn frame_stmt(&mut self, f: &FrameInfo, mut bodies: BTreeMap<usize, Vec<Stmt>>) -> Stmt {
        let last = *bodies.keys().next_back().expect("non-empty frame");
        match &f.kind {
            FrameKind::When { conds, .. } => self.if_chain(conds, 0, last, &mut bodies),
            FrameKind::Switch { subject, labels, matches, unique, .. } => {
                if !self.net.contains_key(subject) && self.constant(*subject).is_none() {
                    return self.if_chain(matches, 0, last, &mut bodies);
                }
                let distinct = labels.iter().all(|l| !matches!(l, CaseLabel::Pattern(_)));
                let keyword = match (unique, distinct) {
                    (true, true) => "unique case",
                    (true, false) => "unique casez",
                    (false, true) => "case",
                    (false, false) => "casez",
                };
                let enum_id = self.e.d.graph.signal(*subject).ty.enum_id();
                let mut arms = Vec::new();
                for (k, l) in labels.iter().enumerate() {
                    let body = bodies.remove(&k);
                    if body.is_none() && distinct {
                        continue;
                    }
                    let label = match l {
                        CaseLabel::Value(v) => literal(v),
                        CaseLabel::Pattern(p) => {
                            let bits: String = (0..p.width())
                                .rev()
                                .map(|i| match p.care().bit(i).to_char() {
                                    '1' => p.value().bit(i).to_char(),
                                    _ => '?',
                                })
                                .collect();
                            format!("{}'b{bits}", p.width())
                        }
                        CaseLabel::State(i) => {
                            let e = enum_id.expect("enum subject");
                            self.state_names[&(e.0, *i)].clone()
                        }
                    };
                    arms.push((vec![label], body.unwrap_or_default()));
                }
                Stmt::Case {
                    keyword,
                    subject: self.operand(*subject),
                    arms,
                    default: bodies.remove(&labels.len()),
                }
            }
        }
    }

    fn if_chain(&mut self, conds: &[SignalId], k: usize, last: usize, bodies: &mut BTreeMap<usize, Vec<Stmt>>) -> Stmt {
        let then = bodies.remove(&k).unwrap_or_default();
        let els = if k >= last {
            Vec::new()
        } else if k + 1 == conds.len() {
            bodies.remove(&(k + 1)).unwrap_or_default()
        } else {
            vec![self.if_chain(conds, k + 1, last, bodies)]
        };
        Stmt::If {
            cond: self.operand(conds[k]),
            then,
            els,
        }
    }
}

/// Lowers `design` to Verilog modules. Instances with identical bodies
/// share one module; `top` names the module holding top-level logic.
pub fn emit_verilog(design: &Design, top: &str) -> Result<Verilog, EmitError> {
    let e = Emitter::new(design)?;
    let mut order = Vec::new();
    fn post(e: &Emitter<'_>, m: ModuleId, order: &mut Vec<ModuleId>) {
        for c in &e.d.module(m).children {
            post(e, *c, order);
        }
        order.push(m);
    }
    for r in design.roots() {
        post(&e, r, &mut order);
    }
    let mut done: HashMap<ModuleId, Emitted> = HashMap::new();
    let mut variants: HashMap<String, Vec<(String, String)>> = HashMap::new();
    let mut taken: HashSet<String> = HashSet::from([top.to_string()]);
    let mut units = Vec::new();
    for m in order {
        let (mut u, ports) = e.unit(Some(m), &done);
        let body = u.render_body();
        let def = &design.module(m).name;
        let vs = variants.entry(def.clone()).or_default();
        let name = match vs.iter().find(|(b, _)| *b == body) {
            Some((_, n)) => n.clone(),
            None => {
                let mut name = if vs.is_empty() { def.clone() } else { format!("{def}_v{}", vs.len()) };
                while !taken.insert(name.clone()) {
                    name.push('_');
                }
                vs.push((body, name.clone()));
                u.name = name.clone();
                units.push(u);
                name
            }
        };
        done.insert(m, Emitted { name, ports });
    }
    let (mut t, _) = e.unit(None, &done);
    t.name = top.to_string();
    units.push(t);
    Ok(Verilog { units })
}
