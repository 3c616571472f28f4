//! Modules, parameters, connections, and elaboration.

use super::{BuildError, Circuit, DefaultClock, FrameInfo, ParamValue, Result, Signal};
use crate::ir::{EnumDef, GateKind, Graph, Init, ModuleId, NetlistKind, PortDir, SignalId, Violation};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub signal: SignalId,
    pub dir: PortDir,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDef {
    pub id: ModuleId,
    /// Definition name (`FullAdder`).
    pub name: String,
    /// Instance name, unique among siblings (`FullAdder_3`).
    pub inst: String,
    pub parent: Option<ModuleId>,
    pub children: Vec<ModuleId>,
    pub params: BTreeMap<String, ParamValue>,
    /// Filled in at elaboration, sorted by signal id.
    pub ports: Vec<Port>,
}

/// A built module together with whatever its body returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<T> {
    pub id: ModuleId,
    pub io: T,
}

impl Circuit {
    /// Builds a module instance: `body` runs with a fresh condition stack,
    /// the parameter scope of `name`, and ownership of every signal and
    /// gate it creates.
    pub fn module<T>(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut Circuit) -> Result<T>,
    ) -> Result<Instance<T>> {
        let id = ModuleId(self.modules.len() as u32);
        let parent = self.location();
        let siblings = self
            .modules
            .iter()
            .filter(|m| m.parent == parent && m.name == name)
            .count();
        let scope = self.params.last().expect("root scope").enter(name);
        self.modules.push(ModuleDef {
            id,
            name: name.to_string(),
            inst: format!("{name}_{siblings}"),
            parent,
            children: Vec::new(),
            params: BTreeMap::new(),
            ports: Vec::new(),
        });
        if let Some(p) = parent {
            self.modules[p.index()].children.push(id);
        }
        self.params.push(scope);
        self.module_stack.push(id);
        let saved = self.take_frames();
        let r = body(self);
        let balanced = self.frames_balanced();
        self.restore_frames(saved);
        self.module_stack.pop();
        let scope = self.params.pop().expect("module scope");
        self.modules[id.index()].params = scope.values().clone();
        let io = r?;
        if !balanced {
            return Err(BuildError::Unbalanced("module body left a when/switch open"));
        }
        Ok(Instance { id, io })
    }

    pub fn param(&self, key: &str) -> Option<ParamValue> {
        self.params.last().and_then(|p| p.get(key).cloned())
    }

    pub fn param_int(&self, key: &str) -> Result<i64> {
        self.param(key)
            .and_then(|v| v.as_int())
            .ok_or_else(|| BuildError::MissingParam(key.to_string()))
    }

    /// Sets a parameter for the current module and its children.
    pub fn set_param(&mut self, key: &str, value: impl Into<ParamValue>) {
        self.params.last_mut().expect("root scope").insert(key, value.into());
    }

    /// Nondirectional connection; the driven side drives the other at
    /// elaboration.
    pub fn connect(&mut self, a: Signal, b: Signal) {
        self.connects.push((a.id, b.id));
    }

    /// Tracks every named signal owned by `m` or its descendants.
    pub fn track_module(&mut self, m: ModuleId) {
        let mods: Vec<ModuleId> = self.subtree(m);
        for s in self.graph.signals.iter_mut() {
            if s.name.is_some() && !s.is_const && s.owner.is_some_and(|o| mods.contains(&o)) {
                s.tracked = true;
            }
        }
    }

    fn subtree(&self, m: ModuleId) -> Vec<ModuleId> {
        let mut out = vec![m];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.modules[out[i].index()].children.iter().copied());
            i += 1;
        }
        out
    }

    fn parent_of(&self, m: ModuleId) -> Option<ModuleId> {
        self.modules[m.index()].parent
    }

    fn lca(&self, a: Option<ModuleId>, b: Option<ModuleId>) -> Option<ModuleId> {
        lca_by(|m| self.parent_of(m), a, b)
    }

    fn resolve_connects(&mut self) -> Result<()> {
        let mut pending = std::mem::take(&mut self.connects);
        while !pending.is_empty() {
            let mut rest = Vec::new();
            let mut progress = false;
            for (a, b) in pending {
                let da = self.graph.signal(a).writer.is_some();
                let db = self.graph.signal(b).writer.is_some();
                let (src, dst) = match (da, db) {
                    (true, true) => {
                        return Err(BuildError::Connect(format!(
                            "both s{} and s{} are driven",
                            a.0, b.0
                        )))
                    }
                    (true, false) => (a, b),
                    (false, true) => (b, a),
                    (false, false) => {
                        rest.push((a, b));
                        continue;
                    }
                };
                let (ws, wd) = (self.graph.signal(src).width, self.graph.signal(dst).width);
                if ws != wd {
                    return Err(BuildError::Connect(format!(
                        "width {ws} of s{} differs from width {wd} of s{}",
                        src.0, dst.0
                    )));
                }
                let at = self.lca(self.graph.signal(a).owner, self.graph.signal(b).owner);
                let saved = std::mem::replace(&mut self.module_stack, at.into_iter().collect());
                let r = self.assign(Signal::new(dst), Signal::new(src));
                self.module_stack = saved;
                r?;
                progress = true;
            }
            if !progress {
                let (a, b) = rest[0];
                return Err(BuildError::Connect(format!(
                    "neither s{} nor s{} is driven",
                    a.0, b.0
                )));
            }
            pending = rest;
        }
        Ok(())
    }

    fn freeze_enums(&mut self) -> Result<()> {
        let used: Vec<bool> = (0..self.enums.len())
            .map(|e| {
                self.graph
                    .signals
                    .iter()
                    .any(|s| s.ty.enum_id().map(|x| x.0 as usize) == Some(e))
            })
            .collect();
        for (e, def) in self.enums.iter_mut().enumerate() {
            if used[e] {
                def.freeze()?;
            }
        }
        for s in self.graph.signals.iter_mut() {
            let Some(e) = s.ty.enum_id() else { continue };
            let def = &self.enums[e.0 as usize];
            s.width = def.width();
            if let Init::EnumState(i) = s.init {
                s.init = Init::Value(def.code(i));
            }
        }
        Ok(())
    }

    /// Wire netlists live where their assignments meet: the common ancestor
    /// of all assignment origins.
    fn place_wires(&mut self) -> Result<()> {
        let parents: Vec<Option<ModuleId>> = self.modules.iter().map(|m| m.parent).collect();
        let parent = |m: ModuleId| parents[m.index()];
        for gi in 0..self.graph.gates.len() {
            let g = &self.graph.gates[gi];
            let GateKind::Netlist(n) = &g.kind else { continue };
            if n.kind != NetlistKind::Wire || n.assigns.is_empty() {
                continue;
            }
            let origins: Vec<Option<ModuleId>> = n.assigns.iter().map(|a| a.origin).collect();
            let loc = origins[1..]
                .iter()
                .fold(origins[0], |acc, o| lca_by(parent, acc, *o));
            let target = self.graph.signal(g.outputs[0].signal);
            if let (Some(owner), None) = (target.owner, target.mark) {
                let inside = |o: &Option<ModuleId>| is_inside_by(parent, owner, *o);
                if origins.iter().any(inside) && !origins.iter().all(inside) {
                    return Err(BuildError::Port(format!(
                        "`{}` is assigned both inside and outside its module; mark its direction",
                        target.name.as_deref().unwrap_or("?")
                    )));
                }
            }
            self.graph.gates[gi].location = loc;
        }
        Ok(())
    }

    fn mark_full_sim(&mut self) {
        for gi in 0..self.graph.gates.len() {
            let g = &self.graph.gates[gi];
            let widths: Vec<usize> = g
                .inputs
                .iter()
                .map(|e| self.graph.signal(e.signal).width)
                .collect();
            let init_binary = g.outputs.first().is_some_and(|o| {
                matches!(&self.graph.signal(o.signal).init, Init::Value(v) if v.is_binary())
            });
            let full = g.kind.needs_full_sim(&widths, init_binary);
            self.graph.gates[gi].always_full_sim = full;
        }
    }

    /// Resolves connections, freezes enums, places wires, infers ports, and
    /// audits the graph.
    pub fn elaborate(mut self) -> Result<Design> {
        if !self.frames_balanced() {
            return Err(BuildError::Unbalanced("when/switch left open"));
        }
        if !self.module_stack.is_empty() {
            return Err(BuildError::Unbalanced("module left open"));
        }
        self.resolve_connects()?;
        self.freeze_enums()?;
        self.place_wires()?;
        self.mark_full_sim();
        let mut design = Design {
            graph: self.graph,
            enums: self.enums,
            modules: self.modules,
            frames: self.frames,
            clock: self.default_clock,
        };
        let ports = design.infer_ports();
        for (m, p) in design.modules.iter_mut().zip(ports) {
            m.ports = p;
        }
        let violations = design.audit();
        if !violations.is_empty() {
            return Err(BuildError::Audit(violations.into_iter().map(|v| v.0).collect()));
        }
        Ok(design)
    }
}

fn lca_by(
    parent: impl Fn(ModuleId) -> Option<ModuleId>,
    a: Option<ModuleId>,
    b: Option<ModuleId>,
) -> Option<ModuleId> {
    let chain = |mut m: Option<ModuleId>| {
        let mut v = Vec::new();
        while let Some(x) = m {
            v.push(x);
            m = parent(x);
        }
        v.reverse();
        v
    };
    let (ca, cb) = (chain(a), chain(b));
    ca.iter()
        .zip(cb.iter())
        .take_while(|(x, y)| x == y)
        .last()
        .map(|(x, _)| *x)
}

fn is_inside_by(parent: impl Fn(ModuleId) -> Option<ModuleId>, m: ModuleId, loc: Option<ModuleId>) -> bool {
    let mut cur = loc;
    while let Some(x) = cur {
        if x == m {
            return true;
        }
        cur = parent(x);
    }
    false
}

/// An elaborated circuit: frozen types, placed gates, and inferred ports.
#[derive(Debug, Clone)]
pub struct Design {
    pub graph: Graph,
    pub enums: Vec<EnumDef>,
    pub modules: Vec<ModuleDef>,
    pub frames: Vec<FrameInfo>,
    pub clock: Option<DefaultClock>,
}

impl Design {
    pub fn module(&self, id: ModuleId) -> &ModuleDef {
        &self.modules[id.index()]
    }

    /// Modules instantiated at the top level.
    pub fn roots(&self) -> Vec<ModuleId> {
        self.modules.iter().filter(|m| m.parent.is_none()).map(|m| m.id).collect()
    }

    pub fn is_inside(&self, m: ModuleId, loc: Option<ModuleId>) -> bool {
        is_inside_by(|x| self.modules[x.index()].parent, m, loc)
    }

    pub fn lca(&self, a: Option<ModuleId>, b: Option<ModuleId>) -> Option<ModuleId> {
        lca_by(|x| self.modules[x.index()].parent, a, b)
    }

    /// Module chain from the top level down to `m`.
    pub fn path(&self, m: ModuleId) -> Vec<ModuleId> {
        let mut v = Vec::new();
        let mut cur = Some(m);
        while let Some(x) = cur {
            v.push(x);
            cur = self.modules[x.index()].parent;
        }
        v.reverse();
        v
    }

    /// Named signal owned by `module` (`None` = top level).
    pub fn signal_named(&self, module: Option<ModuleId>, name: &str) -> Option<SignalId> {
        self.graph
            .signals()
            .iter()
            .find(|s| s.owner == module && s.name.as_deref() == Some(name))
            .map(|s| s.id)
    }

    pub fn module_named(&self, inst: &str) -> Option<ModuleId> {
        self.modules.iter().find(|m| m.inst == inst).map(|m| m.id)
    }

    fn driver_location(&self, s: SignalId) -> Option<ModuleId> {
        self.graph
            .signal(s)
            .writer
            .as_ref()
            .and_then(|w| self.graph.gate(w.gate).location)
    }

    /// Locations that observe `s`: reader gates, plus the outside world for
    /// outputs and dangling named results, plus the owner for marked inputs.
    fn observers(&self, s: SignalId) -> Vec<Option<ModuleId>> {
        let d = self.graph.signal(s);
        let mut rs: Vec<Option<ModuleId>> = d
            .readers
            .iter()
            .map(|r| self.graph.gate(r.gate).location)
            .collect();
        let dangling = d.name.is_some() && d.writer.is_some() && d.readers.is_empty() && d.owner.is_some();
        if d.mark == Some(PortDir::Output) || dangling {
            rs.push(None);
        }
        if d.mark == Some(PortDir::Input) {
            rs.push(d.owner);
        }
        rs.sort();
        rs.dedup();
        rs
    }

    /// Module in which `s` is declared: the common ancestor of its driver
    /// and every observer.
    pub fn scope_of(&self, s: SignalId) -> Option<ModuleId> {
        let d = self.driver_location(s);
        self.observers(s)
            .into_iter()
            .fold(d, |acc, r| self.lca(acc, r))
    }

    /// Ports of every module. A signal is a port of `M` when its driver and
    /// some observer lie on different sides of `M`'s boundary; it is an
    /// output when the driver is inside. Explicit marks override the owner's
    /// entry.
    pub fn infer_ports(&self) -> Vec<Vec<Port>> {
        let mut ports: Vec<BTreeMap<SignalId, PortDir>> = vec![BTreeMap::new(); self.modules.len()];
        for s in self.graph.signals() {
            if s.is_const {
                continue;
            }
            let d = self.driver_location(s.id);
            let rs = self.observers(s.id);
            let mut candidates: Vec<ModuleId> = Vec::new();
            for m in std::iter::once(d).chain(rs.iter().copied()).flatten() {
                candidates.extend(self.path(m));
            }
            candidates.sort();
            candidates.dedup();
            for m in candidates {
                let din = self.is_inside(m, d);
                if rs.iter().any(|r| self.is_inside(m, *r) != din) {
                    let dir = if din { PortDir::Output } else { PortDir::Input };
                    ports[m.index()].insert(s.id, dir);
                }
            }
            if let (Some(o), Some(mark)) = (s.owner, s.mark) {
                ports[o.index()].insert(s.id, mark);
            }
        }
        ports
            .into_iter()
            .map(|p| p.into_iter().map(|(signal, dir)| Port { signal, dir }).collect())
            .collect()
    }

    /// Graph audit plus module-level checks.
    pub fn audit(&self) -> Vec<Violation> {
        let mut v = self.graph.audit();
        for s in self.graph.signals() {
            if s.width == 0 {
                v.push(Violation(format!("signal {} has no width after elaboration", s.id.0)));
            }
            if let Init::EnumState(_) = s.init {
                v.push(Violation(format!("signal {} has an unresolved enum init", s.id.0)));
            }
        }
        let mut seen: HashMap<(Option<ModuleId>, &str), usize> = HashMap::new();
        for m in &self.modules {
            *seen.entry((m.parent, m.inst.as_str())).or_default() += 1;
        }
        for ((_, inst), n) in seen {
            if n > 1 {
                v.push(Violation(format!("instance name `{inst}` used {n} times")));
            }
        }
        v
    }
}
