//! Temporal patterns over clock-sampled values.
//!
//! A pattern is matched from a start step and yields the set of steps at
//! which it can end, together with the values it captured. Zero-length
//! patterns (signal tests, comparisons, captures) check the step they start
//! at; `Wait(n)` ends `n` steps later. `a >> b` starts `b` at the step where
//! `a` ends. Repetitions are consecutive: each repetition starts one step
//! after the previous one ended.

use crate::ir::SignalId;
use crate::logic::{Bit, CmpOp, Logic};
use std::collections::BTreeMap;
use std::ops;

/// Values captured by `{name: signal}` along one match.
pub type Env = BTreeMap<String, Logic>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rhs {
    Value(Logic),
    Captured(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// Wait for `n` trigger edges.
    Wait(usize),
    /// Wait for any of `m..=n` trigger edges.
    WaitRange(usize, usize),
    /// Wait until the sampled value of the signal changes.
    EdgeOf(SignalId),
    /// Wait until the signal samples as the value.
    Until(SignalId, Logic),
    Capture(String, SignalId),
    Repeat(Box<Pattern>, usize),
    RepeatRange(Box<Pattern>, usize, usize),
    Not(Box<Pattern>),
    /// Both from the same step; ends where the later one ends.
    And(Box<Pattern>, Box<Pattern>),
    Seq(Box<Pattern>, Box<Pattern>),
    Or(Box<Pattern>, Box<Pattern>),
    /// Succeeds if the left side cannot match, or the right side matches
    /// from some end of the left side.
    Implies(Box<Pattern>, Box<Pattern>),
    True(SignalId),
    Cmp(CmpOp, SignalId, Rhs),
    Rose(SignalId),
    Fell(SignalId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("negation of a pattern with no finite horizon")]
    Unbounded,
    #[error("empty range {0}..={1}")]
    EmptyRange(usize, usize),
}

pub fn wait(n: usize) -> Pattern {
    Pattern::Wait(n)
}

pub fn wait_range(m: usize, n: usize) -> Pattern {
    Pattern::WaitRange(m, n)
}

pub fn edge(s: impl Into<SignalId>) -> Pattern {
    Pattern::EdgeOf(s.into())
}

pub fn until(s: impl Into<SignalId>, v: Logic) -> Pattern {
    Pattern::Until(s.into(), v)
}

pub fn capture(name: &str, s: impl Into<SignalId>) -> Pattern {
    Pattern::Capture(name.to_string(), s.into())
}

pub fn sig(s: impl Into<SignalId>) -> Pattern {
    Pattern::True(s.into())
}

pub fn rose(s: impl Into<SignalId>) -> Pattern {
    Pattern::Rose(s.into())
}

pub fn fell(s: impl Into<SignalId>) -> Pattern {
    Pattern::Fell(s.into())
}

pub fn cmp(op: CmpOp, s: impl Into<SignalId>, rhs: Rhs) -> Pattern {
    Pattern::Cmp(op, s.into(), rhs)
}

pub fn eq_value(s: impl Into<SignalId>, v: Logic) -> Pattern {
    cmp(CmpOp::Eq, s, Rhs::Value(v))
}

/// `s == a.get(name)`.
pub fn eq_captured(s: impl Into<SignalId>, name: &str) -> Pattern {
    cmp(CmpOp::Eq, s, Rhs::Captured(name.to_string()))
}

/// Left-to-right sequence of the parts.
pub fn seq(parts: impl IntoIterator<Item = Pattern>) -> Pattern {
    parts
        .into_iter()
        .reduce(|a, b| a >> b)
        .unwrap_or(Pattern::Wait(0))
}

impl Pattern {
    pub fn repeat(self, n: usize) -> Pattern {
        Pattern::Repeat(Box::new(self), n)
    }

    pub fn repeat_range(self, m: usize, n: usize) -> Pattern {
        Pattern::RepeatRange(Box::new(self), m, n)
    }

    pub fn implies(self, rhs: Pattern) -> Pattern {
        Pattern::Implies(Box::new(self), Box::new(rhs))
    }

    /// True when every match is decided within a bounded number of steps.
    pub fn is_bounded(&self) -> bool {
        use Pattern::*;
        match self {
            EdgeOf(_) | Until(..) => false,
            Wait(_) | WaitRange(..) | Capture(..) | True(_) | Cmp(..) | Rose(_) | Fell(_) => true,
            Repeat(p, _) | RepeatRange(p, ..) | Not(p) => p.is_bounded(),
            And(a, b) | Seq(a, b) | Or(a, b) | Implies(a, b) => a.is_bounded() && b.is_bounded(),
        }
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        use Pattern::*;
        match self {
            Not(p) if !p.is_bounded() => Err(PatternError::Unbounded),
            WaitRange(m, n) | RepeatRange(_, m, n) if m > n => Err(PatternError::EmptyRange(*m, *n)),
            Repeat(p, _) | RepeatRange(p, ..) | Not(p) => p.validate(),
            And(a, b) | Seq(a, b) | Or(a, b) | Implies(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    /// Signals the pattern samples.
    pub fn signals(&self, out: &mut Vec<SignalId>) {
        use Pattern::*;
        match self {
            Wait(_) | WaitRange(..) => {}
            EdgeOf(s) | Until(s, _) | Capture(_, s) | True(s) | Cmp(_, s, _) | Rose(s) | Fell(s) => {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
            Repeat(p, _) | RepeatRange(p, ..) | Not(p) => p.signals(out),
            And(a, b) | Seq(a, b) | Or(a, b) | Implies(a, b) => {
                a.signals(out);
                b.signals(out);
            }
        }
    }
}

impl ops::Shr for Pattern {
    type Output = Pattern;

    fn shr(self, rhs: Pattern) -> Pattern {
        Pattern::Seq(Box::new(self), Box::new(rhs))
    }
}

impl ops::BitAnd for Pattern {
    type Output = Pattern;

    fn bitand(self, rhs: Pattern) -> Pattern {
        Pattern::And(Box::new(self), Box::new(rhs))
    }
}

impl ops::BitOr for Pattern {
    type Output = Pattern;

    fn bitor(self, rhs: Pattern) -> Pattern {
        Pattern::Or(Box::new(self), Box::new(rhs))
    }
}

impl ops::Not for Pattern {
    type Output = Pattern;

    fn not(self) -> Pattern {
        Pattern::Not(Box::new(self))
    }
}

/// Sampled values, one row per trigger edge.
#[derive(Debug, Clone, Default)]
pub struct Samples {
    cols: BTreeMap<SignalId, usize>,
    rows: Vec<Vec<Logic>>,
}

impl Samples {
    pub fn new(signals: &[SignalId]) -> Samples {
        Samples {
            cols: signals.iter().enumerate().map(|(i, s)| (*s, i)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn signals(&self) -> Vec<SignalId> {
        let mut v: Vec<_> = self.cols.iter().map(|(s, i)| (*i, *s)).collect();
        v.sort();
        v.into_iter().map(|(_, s)| s).collect()
    }

    /// Appends a row; values in the order given to `new`.
    pub fn push(&mut self, row: Vec<Logic>) {
        assert_eq!(row.len(), self.cols.len(), "sample row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, step: usize, s: SignalId) -> Option<&Logic> {
        let row = self.rows.get(step)?;
        Some(&row[*self.cols.get(&s).expect("signal not sampled")])
    }
}

/// Possible ends of a match. `incomplete` is set when some alternative
/// needs steps that have not been sampled yet.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub ends: Vec<(usize, Env)>,
    pub incomplete: bool,
}

impl Outcome {
    fn none() -> Outcome {
        Outcome::default()
    }

    fn pending() -> Outcome {
        Outcome {
            ends: Vec::new(),
            incomplete: true,
        }
    }

    fn at(step: usize, env: Env) -> Outcome {
        Outcome {
            ends: vec![(step, env)],
            incomplete: false,
        }
    }

    fn push(&mut self, end: (usize, Env)) {
        if !self.ends.contains(&end) {
            self.ends.push(end);
        }
    }

    fn absorb(&mut self, o: Outcome) {
        self.incomplete |= o.incomplete;
        for e in o.ends {
            self.push(e);
        }
    }

    /// Failed for good: no end and nothing left to sample.
    fn failed(&self) -> bool {
        self.ends.is_empty() && !self.incomplete
    }
}

fn test(s: &Samples, i: usize, env: &Env, f: impl FnOnce(&Samples) -> Option<bool>) -> Outcome {
    if i >= s.len() {
        return Outcome::pending();
    }
    match f(s) {
        Some(true) => Outcome::at(i, env.clone()),
        _ => Outcome::none(),
    }
}

fn bit0(l: &Logic) -> Bit {
    l.bit(0)
}

/// All ends of `p` started at step `i`.
pub fn eval(p: &Pattern, s: &Samples, i: usize, env: &Env) -> Outcome {
    use Pattern::*;
    match p {
        Wait(n) => Outcome::at(i + n, env.clone()),
        WaitRange(m, n) => {
            let mut o = Outcome::none();
            for k in *m..=*n {
                o.push((i + k, env.clone()));
            }
            o
        }
        EdgeOf(sig) => {
            let mut j = i + 1;
            while j < s.len() {
                if s.value(j, *sig) != s.value(j - 1, *sig) {
                    return Outcome::at(j, env.clone());
                }
                j += 1;
            }
            Outcome::pending()
        }
        Until(sig, v) => {
            for j in i..s.len() {
                if s.value(j, *sig) == Some(v) {
                    return Outcome::at(j, env.clone());
                }
            }
            Outcome::pending()
        }
        Capture(name, sig) => {
            if i >= s.len() {
                return Outcome::pending();
            }
            let mut env = env.clone();
            env.insert(name.clone(), s.value(i, *sig).unwrap().clone());
            Outcome::at(i, env)
        }
        Repeat(p, n) => repeat(p, *n, s, i, env),
        RepeatRange(p, m, n) => {
            let mut o = Outcome::none();
            for k in *m..=*n {
                o.absorb(repeat(p, k, s, i, env));
            }
            o
        }
        Not(p) => {
            let r = eval(p, s, i, env);
            if r.ends.iter().any(|(e, _)| *e < s.len()) {
                Outcome::none()
            } else if r.incomplete || !r.ends.is_empty() {
                Outcome::pending()
            } else {
                Outcome::at(i, env.clone())
            }
        }
        And(a, b) => {
            let ra = eval(a, s, i, env);
            let rb = eval(b, s, i, env);
            if ra.failed() || rb.failed() {
                return Outcome::none();
            }
            let mut o = Outcome {
                ends: Vec::new(),
                incomplete: ra.incomplete || rb.incomplete,
            };
            for (ea, enva) in &ra.ends {
                for (eb, envb) in &rb.ends {
                    let mut env = enva.clone();
                    env.extend(envb.iter().map(|(k, v)| (k.clone(), v.clone())));
                    o.push(((*ea).max(*eb), env));
                }
            }
            o
        }
        Seq(a, b) => {
            let ra = eval(a, s, i, env);
            let mut o = Outcome {
                ends: Vec::new(),
                incomplete: ra.incomplete,
            };
            for (e, env) in &ra.ends {
                o.absorb(eval(b, s, *e, env));
            }
            o
        }
        Or(a, b) => {
            let mut o = eval(a, s, i, env);
            o.absorb(eval(b, s, i, env));
            o
        }
        Implies(a, b) => {
            let ra = eval(a, s, i, env);
            if ra.ends.is_empty() {
                return if ra.incomplete { Outcome::pending() } else { Outcome::at(i, env.clone()) };
            }
            let mut o = Outcome {
                ends: Vec::new(),
                incomplete: ra.incomplete,
            };
            for (e, env) in &ra.ends {
                o.absorb(eval(b, s, *e, env));
            }
            o
        }
        True(sig) => test(s, i, env, |s| Some(s.value(i, *sig)?.truth() == Bit::One)),
        Cmp(op, sig, rhs) => test(s, i, env, |s| {
            let a = s.value(i, *sig)?;
            let b = match rhs {
                Rhs::Value(v) => v,
                Rhs::Captured(name) => env.get(name)?,
            };
            let w = a.width().max(b.width());
            let r = a.resize(w, false).cmp(*op, &b.resize(w, false), false).ok()?;
            Some(r.bit(0) == Bit::One)
        }),
        Rose(sig) => {
            if i == 0 {
                return test(s, i, env, |_| Some(false));
            }
            test(s, i, env, |s| {
                Some(bit0(s.value(i - 1, *sig)?) == Bit::Zero && bit0(s.value(i, *sig)?) == Bit::One)
            })
        }
        Fell(sig) => {
            if i == 0 {
                return test(s, i, env, |_| Some(false));
            }
            test(s, i, env, |s| {
                Some(bit0(s.value(i - 1, *sig)?) == Bit::One && bit0(s.value(i, *sig)?) == Bit::Zero)
            })
        }
    }
}

fn repeat(p: &Pattern, n: usize, s: &Samples, i: usize, env: &Env) -> Outcome {
    if n == 0 {
        return Outcome::at(i, env.clone());
    }
    let mut o = eval(p, s, i, env);
    for _ in 1..n {
        let mut next = Outcome {
            ends: Vec::new(),
            incomplete: o.incomplete,
        };
        for (e, env) in &o.ends {
            next.absorb(eval(p, s, e + 1, env));
        }
        o = next;
    }
    o
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Pending,
}

/// Verdict of an attempt of `p` started at step `start`, given the steps
/// sampled so far.
pub fn verdict(p: &Pattern, s: &Samples, start: usize) -> Verdict {
    let o = eval(p, s, start, &Env::new());
    if o.ends.iter().any(|(e, _)| *e < s.len()) {
        Verdict::Pass
    } else if o.incomplete || !o.ends.is_empty() {
        Verdict::Pending
    } else {
        Verdict::Fail
    }
}
