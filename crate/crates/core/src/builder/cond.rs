//! `when`/`switch` condition frames and conditional assignment.

use super::{BuildError, Circuit, Operand, Result, Signal};
use crate::ir::{
    Assignment, CondRef, CondTerm, Direction, FrameId, GateKind, ModuleId, Netlist, NetlistKind,
    SignalId, TargetRange,
};
use crate::logic::{BitPat, CmpOp, Logic};

/// Label of one `switch` case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseLabel {
    Value(Logic),
    Pattern(BitPat),
    /// Enum state index.
    State(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameKind {
    /// Branch `k < conds.len()` is guarded by `conds[k]`; branch
    /// `conds.len()` is the `otherwise` branch.
    When {
        conds: Vec<SignalId>,
        has_otherwise: bool,
    },
    /// Branch `k < labels.len()` is case `labels[k]` (with 1-bit match
    /// signal `matches[k]`); branch `labels.len()` is the default.
    Switch {
        subject: SignalId,
        labels: Vec<CaseLabel>,
        matches: Vec<SignalId>,
        unique: bool,
        has_default: bool,
    },
}

/// A `when` or `switch` block as recorded for emission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameInfo {
    pub id: FrameId,
    /// Enclosing branch, if nested.
    pub parent: Option<CondRef>,
    pub module: Option<ModuleId>,
    pub kind: FrameKind,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenFrame {
    id: FrameId,
    branch: Option<usize>,
}

struct Term {
    signal: SignalId,
    polarity: bool,
    unique: bool,
}

impl Circuit {
    fn push_frame(&mut self, kind: FrameKind, branch: Option<usize>) -> FrameId {
        let id = FrameId(self.frames.len() as u32);
        let parent = self.open.last().and_then(|f| {
            f.branch.map(|branch| CondRef { frame: f.id, branch })
        });
        self.frames.push(FrameInfo {
            id,
            parent,
            module: self.location(),
            kind,
        });
        self.open.push(OpenFrame { id, branch });
        id
    }

    fn top_frame(&mut self) -> Option<(&mut OpenFrame, &mut FrameInfo)> {
        let f = self.open.last_mut()?;
        let info = &mut self.frames[f.id.0 as usize];
        Some((f, info))
    }

    pub fn when_begin(&mut self, cond: impl Into<Operand>) -> Result<()> {
        let c = self.materialize(&cond.into(), Some(1), None)?;
        let c = self.truth(c)?;
        self.push_frame(
            FrameKind::When {
                conds: vec![c.id],
                has_otherwise: false,
            },
            Some(0),
        );
        Ok(())
    }

    pub fn elsewhen(&mut self, cond: impl Into<Operand>) -> Result<()> {
        let c = self.materialize(&cond.into(), Some(1), None)?;
        let c = self.truth(c)?;
        match self.top_frame() {
            Some((f, FrameInfo { kind: FrameKind::When { conds, has_otherwise: false }, .. })) => {
                conds.push(c.id);
                f.branch = Some(conds.len() - 1);
                Ok(())
            }
            _ => Err(BuildError::Unbalanced("elsewhen without when")),
        }
    }

    pub fn otherwise(&mut self) -> Result<()> {
        match self.top_frame() {
            Some((f, FrameInfo { kind: FrameKind::When { conds, has_otherwise }, .. }))
                if !*has_otherwise =>
            {
                *has_otherwise = true;
                f.branch = Some(conds.len());
                Ok(())
            }
            _ => Err(BuildError::Unbalanced("otherwise without when")),
        }
    }

    pub fn when_end(&mut self) -> Result<()> {
        match self.top_frame() {
            Some((_, FrameInfo { kind: FrameKind::When { .. }, .. })) => {
                self.open.pop();
                Ok(())
            }
            _ => Err(BuildError::Unbalanced("when_end without when")),
        }
    }

    /// `when cond: body` as a closure.
    pub fn when<T>(
        &mut self,
        cond: impl Into<Operand>,
        body: impl FnOnce(&mut Circuit) -> Result<T>,
    ) -> Result<T> {
        self.when_begin(cond)?;
        let r = body(self)?;
        self.when_end()?;
        Ok(r)
    }

    /// Opens a `switch` on `subject`. A `unique` switch asserts its cases
    /// never overlap; an X subject then makes assignments under it all-X.
    pub fn switch_begin(&mut self, subject: Signal, unique: bool) -> Result<()> {
        self.push_frame(
            FrameKind::Switch {
                subject: subject.id,
                labels: Vec::new(),
                matches: Vec::new(),
                unique,
                has_default: false,
            },
            None,
        );
        Ok(())
    }

    /// Starts a case. `label` may be a literal, a [`BitPat`] (as
    /// `Operand::Text` with `?` digits), or an enum state name.
    pub fn case_begin(&mut self, label: impl Into<Operand>) -> Result<()> {
        let Some(top) = self.open.last().copied() else {
            return Err(BuildError::Unbalanced("case outside switch"));
        };
        let FrameKind::Switch { subject, has_default, .. } = &self.frames[top.id.0 as usize].kind
        else {
            return Err(BuildError::Unbalanced("case outside switch"));
        };
        if *has_default {
            return Err(BuildError::Unbalanced("case after default"));
        }
        let subject = Signal::new(*subject);
        let label = label.into();
        let (m, case_label) = self.case_match(subject, &label)?;
        let FrameKind::Switch { labels, matches, .. } = &mut self.frames[top.id.0 as usize].kind
        else {
            unreachable!()
        };
        labels.push(case_label);
        matches.push(m.id);
        let k = labels.len() - 1;
        self.open.last_mut().unwrap().branch = Some(k);
        Ok(())
    }

    fn case_match(&mut self, subject: Signal, label: &Operand) -> Result<(Signal, CaseLabel)> {
        let subject_ty = self.graph.signal(subject.id).ty.clone();
        if let Some(e) = subject_ty.enum_id() {
            let Operand::Text(name) = label else {
                return Err(BuildError::Type("enum case labels must be state names".into()));
            };
            let (idx, _) = self.enums[e.0 as usize].intern(name)?;
            let m = self.eq(subject, label.clone())?;
            return Ok((m, CaseLabel::State(idx)));
        }
        let w = self.width(subject);
        match label {
            Operand::Text(t) if t.contains('?') => {
                let pat: BitPat = t.parse()?;
                let m = self.matches(subject, &pat)?;
                Ok((m, CaseLabel::Pattern(pat)))
            }
            Operand::Sig(_) => Err(BuildError::Type("case labels must be constants".into())),
            other => {
                let lit = match other {
                    Operand::Lit(l) => l.clone(),
                    Operand::Int(i) => super::int_logic(*i, w)?,
                    Operand::Text(t) => t.parse()?,
                    Operand::Sig(_) => unreachable!(),
                };
                if lit.width() != w {
                    return Err(BuildError::Width {
                        what: "case label",
                        expected: w,
                        got: lit.width(),
                    });
                }
                let m = self.cmp(CmpOp::Eq, subject, lit.clone())?;
                Ok((m, CaseLabel::Value(lit)))
            }
        }
    }

    pub fn case_default(&mut self) -> Result<()> {
        match self.top_frame() {
            Some((f, FrameInfo { kind: FrameKind::Switch { labels, has_default, .. }, .. }))
                if !*has_default =>
            {
                *has_default = true;
                f.branch = Some(labels.len());
                Ok(())
            }
            _ => Err(BuildError::Unbalanced("default outside switch")),
        }
    }

    pub fn switch_end(&mut self) -> Result<()> {
        match self.top_frame() {
            Some((_, FrameInfo { kind: FrameKind::Switch { .. }, .. })) => {
                self.open.pop();
                Ok(())
            }
            _ => Err(BuildError::Unbalanced("switch_end without switch")),
        }
    }

    pub(crate) fn frames_balanced(&self) -> bool {
        self.open.is_empty()
    }

    pub(crate) fn take_frames(&mut self) -> Vec<OpenFrame> {
        std::mem::take(&mut self.open)
    }

    pub(crate) fn restore_frames(&mut self, frames: Vec<OpenFrame>) {
        self.open = frames;
    }

    /// Conjunction guarding the current position, outermost frame first.
    fn current_terms(&self) -> Result<(Vec<CondRef>, Vec<Term>)> {
        let mut path = Vec::new();
        let mut terms = Vec::new();
        for f in &self.open {
            let Some(branch) = f.branch else {
                return Err(BuildError::Unbalanced("assignment in switch outside any case"));
            };
            path.push(CondRef { frame: f.id, branch });
            let neg = |s: &SignalId, unique| Term {
                signal: *s,
                polarity: false,
                unique,
            };
            match &self.frames[f.id.0 as usize].kind {
                FrameKind::When { conds, .. } => {
                    terms.extend(conds[..branch].iter().map(|s| neg(s, false)));
                    if let Some(c) = conds.get(branch) {
                        terms.push(Term {
                            signal: *c,
                            polarity: true,
                            unique: false,
                        });
                    }
                }
                FrameKind::Switch { matches, unique, .. } => match (matches.get(branch), unique) {
                    (Some(m), true) => terms.push(Term {
                        signal: *m,
                        polarity: true,
                        unique: true,
                    }),
                    (Some(m), false) => {
                        terms.extend(matches[..branch].iter().map(|s| neg(s, false)));
                        terms.push(Term {
                            signal: *m,
                            polarity: true,
                            unique: false,
                        });
                    }
                    (None, u) => terms.extend(matches.iter().map(|s| neg(s, *u))),
                },
            }
        }
        Ok((path, terms))
    }

    /// Netlist gate driving `target`, creating a Wire if it has no driver.
    fn netlist_of(&mut self, target: Signal) -> Result<crate::ir::GateId> {
        let data = self.graph.signal(target.id);
        if data.is_const {
            return Err(BuildError::NotAssignable(self.describe(target), "constant"));
        }
        match &data.writer {
            Some(w) => {
                let g = w.gate;
                match &self.graph.gate(g).kind {
                    GateKind::Netlist(_) => Ok(g),
                    k => Err(BuildError::NotAssignable(self.describe(target), k.name())),
                }
            }
            None => {
                let signed = data.ty.is_signed();
                let ty = data.ty.clone();
                let kind = GateKind::Netlist(Box::new(Netlist {
                    kind: NetlistKind::Wire,
                    assigns: Vec::new(),
                    signed,
                }));
                let g = self.graph.add_gate(kind, self.delays.wire, self.location());
                self.graph.connect(g, target.id, Direction::Write, ty)?;
                Ok(g)
            }
        }
    }

    /// Value operand adapted to `width` bits by the target's signedness, or
    /// to the target's enum.
    fn assign_value(&mut self, target: Signal, value: &Operand, width: Option<usize>) -> Result<Signal> {
        let tty = self.graph.signal(target.id).ty.clone();
        if let (Some(e), None) = (tty.enum_id(), width) {
            let v = self.materialize(value, None, Some(e))?;
            if self.graph.signal(v.id).ty.enum_id() != Some(e) {
                return Err(BuildError::Type(format!(
                    "assigning a non-enum value to enum signal `{}`",
                    self.describe(target)
                )));
            }
            return Ok(v);
        }
        let w = match width {
            Some(w) => w,
            None => self.width(target),
        };
        let v = self.materialize(value, Some(w), None)?;
        if self.width(v) == 0 {
            return Err(BuildError::PendingWidth(self.describe(v)));
        }
        self.resize(v, w, tty.is_signed())
    }

    fn record(&mut self, target: Signal, value: Signal, range: TargetRange, extra: Option<Signal>) -> Result<()> {
        let (path, terms) = self.current_terms()?;
        let g = self.netlist_of(target)?;
        let value_in = self.read_shared(g, value)?;
        let range = match (range, extra) {
            (TargetRange::Dynamic { count, .. }, Some(idx)) => TargetRange::Dynamic {
                idx: self.read_shared(g, idx)?,
                count,
            },
            (r, _) => r,
        };
        let mut conds = Vec::with_capacity(terms.len());
        for t in terms {
            conds.push(CondTerm {
                input: self.read_shared(g, Signal::new(t.signal))?,
                polarity: t.polarity,
                unique: t.unique,
            });
        }
        let origin = self.location();
        let GateKind::Netlist(n) = &mut self.graph.gate_mut(g).kind else {
            unreachable!()
        };
        n.assigns.push(Assignment {
            path,
            conds,
            value: value_in,
            range,
            origin,
        });
        Ok(())
    }

    /// `target <== value` under the current conditions. Later assignments
    /// take priority.
    pub fn assign(&mut self, target: Signal, value: impl Into<Operand>) -> Result<()> {
        let v = self.assign_value(target, &value.into(), None)?;
        self.record(target, v, TargetRange::Full, None)
    }

    /// `target[low : low+count] <== value`.
    pub fn assign_range(
        &mut self,
        target: Signal,
        low: usize,
        count: usize,
        value: impl Into<Operand>,
    ) -> Result<()> {
        let width = self.known_target_width(target)?;
        if count == 0 || low + count > width {
            return Err(BuildError::Range { low, count, width });
        }
        let v = self.assign_value(target, &value.into(), Some(count))?;
        self.record(target, v, TargetRange::Static { low, count }, None)
    }

    /// `target[idx::count] <== value`: replaces `count` bits starting at the
    /// runtime index. Bits past the top are dropped; an X index makes the
    /// whole target X.
    pub fn assign_dynamic(
        &mut self,
        target: Signal,
        idx: Signal,
        count: usize,
        value: impl Into<Operand>,
    ) -> Result<()> {
        let width = self.known_target_width(target)?;
        if count == 0 || count > width {
            return Err(BuildError::Range { low: 0, count, width });
        }
        let v = self.assign_value(target, &value.into(), Some(count))?;
        self.record(target, v, TargetRange::Dynamic { idx: 0, count }, Some(idx))
    }

    fn known_target_width(&self, target: Signal) -> Result<usize> {
        match self.width(target) {
            0 => Err(BuildError::PendingWidth(self.describe(target))),
            w => Ok(w),
        }
    }

    /// Assigns leafwise; values broadcast over targets.
    pub fn assign_array(
        &mut self,
        targets: &super::HArray<Signal>,
        values: &super::HArray<Operand>,
    ) -> Result<()> {
        let t = targets.map(&mut |s| Operand::Sig(*s));
        super::zip_map(&[t, values.clone()], &mut |v: &[Operand]| {
            let Operand::Sig(target) = v[0] else { unreachable!() };
            self.assign(target, v[1].clone())
        })?;
        Ok(())
    }
}
