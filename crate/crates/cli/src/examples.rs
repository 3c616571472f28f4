//! The packaged example designs and their test benches.

use crate::oracle::{from_big, to_big, Coin, VendingModel};
use hgl::builder::{Circuit, Design, ParamTree};
use hgl::designs::{self, AdderIo, FullAdderIo, MulIo, VendingIo};
use hgl::logic::Logic;
use hgl::sim::{Stats, Strategy};
use hgl::verify::pattern::{eq_value, sig, wait};
use hgl::verify::{Ledger, Session, Tb, VerifyError, CLOCK_HALF_PERIOD};
use rand::Rng;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Example {
    Vending,
    Ripple,
    Koggestone,
    Fulladder,
    Wallace,
}

impl Example {
    pub const ALL: [Example; 5] = [
        Example::Vending,
        Example::Ripple,
        Example::Koggestone,
        Example::Fulladder,
        Example::Wallace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Vending => "vending",
            Example::Ripple => "ripple",
            Example::Koggestone => "koggestone",
            Example::Fulladder => "fulladder",
            Example::Wallace => "wallace",
        }
    }

    /// Parameters the example accepts, with defaults.
    pub fn params(self) -> &'static [(&'static str, i64)] {
        match self {
            Example::Ripple => &[("w", 32)],
            Example::Koggestone => &[("w", 64)],
            Example::Wallace => &[("w", 32)],
            Example::Vending | Example::Fulladder => &[],
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags or parameters.
    Usage(String),
    Build(String),
    Sim(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Build(m) => write!(f, "build failed: {m}"),
            CliError::Sim(m) => write!(f, "simulation failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Parses `key=value` with an integer value.
pub fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.trim().parse::<i64>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone, Copy)]
pub enum Handles {
    Vending(VendingIo),
    Adder(AdderIo),
    FullAdder(FullAdderIo),
    Wallace(MulIo),
}

#[derive(Debug, Clone)]
pub struct Built {
    pub example: Example,
    pub design: Design,
    pub handles: Handles,
    /// Resolved parameter values.
    pub params: Vec<(String, i64)>,
}

fn resolve(example: Example, given: &[(String, i64)]) -> Result<Vec<(String, i64)>, CliError> {
    let mut out: Vec<(String, i64)> = example.params().iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in given {
        match out.iter_mut().find(|(name, _)| name == k) {
            Some(slot) => slot.1 = *v,
            None => return Err(CliError::Usage(format!("{example} has no parameter `{k}`"))),
        }
    }
    for (k, v) in &out {
        let max = if example == Example::Wallace { 128 } else { 1024 };
        if *v < 1 || *v > max {
            return Err(CliError::Usage(format!("{k}={v} out of range 1..={max}")));
        }
    }
    Ok(out)
}

/// Elaborates an example with a default clock and every named signal of
/// its module tracked.
pub fn build(example: Example, given: &[(String, i64)]) -> Result<Built, CliError> {
    elaborate(example, given, true)
}

/// Elaborates only the example's own hardware, as `emit` writes it.
pub fn design_only(example: Example, given: &[(String, i64)]) -> Result<Design, CliError> {
    Ok(elaborate(example, given, false)?.design)
}

fn elaborate(example: Example, given: &[(String, i64)], for_sim: bool) -> Result<Built, CliError> {
    let params = resolve(example, given)?;
    let w = params.first().map_or(0, |p| p.1 as usize);
    let err = |e: hgl::builder::BuildError| CliError::Build(e.to_string());
    let mut c = match example {
        Example::Ripple | Example::Koggestone => Circuit::with_params(ParamTree::new().set("w", w as i64)),
        _ => Circuit::new(),
    };
    let clock = if for_sim { Some(c.default_clock().map_err(err)?) } else { None };
    let (module, handles) = match example {
        Example::Vending => {
            let i = designs::vending(&mut c).map_err(err)?;
            (i.id, Handles::Vending(i.io))
        }
        Example::Ripple => {
            let i = designs::ripple_carry(&mut c).map_err(err)?;
            (i.id, Handles::Adder(i.io))
        }
        Example::Koggestone => {
            let i = designs::kogge_stone(&mut c).map_err(err)?;
            (i.id, Handles::Adder(i.io))
        }
        Example::Fulladder => {
            let i = designs::full_adder(&mut c).map_err(err)?;
            (i.id, Handles::FullAdder(i.io))
        }
        Example::Wallace => {
            let i = designs::wallace(&mut c, w).map_err(err)?;
            (i.id, Handles::Wallace(i.io))
        }
    };
    if let Some(clock) = clock {
        c.track(&[clock.clk.into(), clock.rst_n.into()]);
        c.track_module(module);
    }
    let design = c.elaborate().map_err(err)?;
    Ok(Built {
        example,
        design,
        handles,
        params,
    })
}

#[derive(Debug, Clone)]
pub struct RunOpts {
    pub example: Example,
    pub cycles: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub params: Vec<(String, i64)>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub ledger: Ledger,
    pub vcd: String,
    pub stats: Stats,
    pub end_time: u64,
    pub params: Vec<(String, i64)>,
}

impl RunOutput {
    /// Summary as `key=value` lines.
    pub fn summary(&self, opts: &RunOpts) -> String {
        let mut s = format!(
            "example={}\nstrategy={}\nseed={}\ncycles={}\n",
            opts.example,
            opts.strategy.name(),
            opts.seed,
            opts.cycles
        );
        for (k, v) in &self.params {
            s += &format!("param.{k}={v}\n");
        }
        s += &format!("end_time={}\n", self.end_time);
        s += &self.ledger.report(10);
        for (k, v) in self.stats.pairs() {
            s += &format!("sim.{k}={v}\n");
        }
        s
    }
}

/// Builds the example, runs its test bench for `cycles` clock cycles and
/// collects the ledger and waveform.
pub fn run(opts: &RunOpts) -> Result<RunOutput, CliError> {
    let built = build(opts.example, &opts.params)?;
    let params = built.params.clone();
    let sim_err = |e: VerifyError| CliError::Sim(e.to_string());
    let mut sess = Session::new(built.design.clone(), opts.strategy, opts.seed).map_err(sim_err)?;
    let n = opts.cycles;
    sess.set_time_limit((2 * n as u64 + 4) * 2 * CLOCK_HALF_PERIOD);
    let task = match built.handles {
        Handles::Vending(io) => {
            let idle = vending_idle(&built.design);
            let a = sess.clocked_assertion("vending").map_err(sim_err)?;
            sess.check(a, "valid_then_idle", sig(io.valid).implies(wait(1) >> eq_value(io.state, idle.clone())))
                .map_err(sim_err)?;
            sess.check(a, "valid_one_cycle", sig(io.valid).implies(wait(1) >> !sig(io.valid)))
                .map_err(sim_err)?;
            let rst_n = built.design.clock.expect("default clock").rst_n;
            sess.spawn("vending_tb", move |tb| vending_tb(tb, io, rst_n, idle, n))
        }
        Handles::Adder(io) => sess.spawn("adder_tb", move |tb| adder_tb(tb, io, n)),
        Handles::FullAdder(io) => sess.spawn("fulladder_tb", move |tb| full_adder_tb(tb, io, n)),
        Handles::Wallace(io) => sess.spawn("wallace_tb", move |tb| wallace_tb(tb, io, n)),
    };
    sess.join(&[task]).map_err(sim_err)?;
    Ok(RunOutput {
        ledger: sess.ledger(),
        vcd: sess.vcd("top"),
        stats: sess.stats(),
        end_time: sess.time(),
        params,
    })
}

/// Encoding of `sIdle` in the elaborated vending machine.
pub fn vending_idle(d: &Design) -> Logic {
    let e = d.enums.iter().find(|e| e.name == "state").expect("state enum");
    e.code(e.index_of("sIdle").expect("sIdle"))
}

/// Drives random coins after each falling edge and compares `valid` with
/// the money model one cycle later.
pub async fn vending_tb(
    tb: Tb,
    io: VendingIo,
    rst_n: hgl::ir::SignalId,
    idle: Logic,
    n: usize,
) -> Result<(), VerifyError> {
    tb.setv_u64(rst_n, 0)?;
    tb.clock_n(1).await?;
    tb.setv_u64(rst_n, 1)?;
    let coins: Vec<Coin> = tb.with_rng(|r| (0..n).map(|_| Coin::ALL[r.gen_range(0..3)]).collect());
    vending_sequence(&tb, io, &idle, &coins).await
}

/// Presents `coins` one per cycle from a falling edge with the machine idle.
pub async fn vending_sequence(tb: &Tb, io: VendingIo, idle: &Logic, coins: &[Coin]) -> Result<(), VerifyError> {
    let mut model = VendingModel::default();
    for coin in coins {
        tb.setv_u64(io.nickel, u64::from(*coin == Coin::Nickel))?;
        tb.setv_u64(io.dime, u64::from(*coin == Coin::Dime))?;
        let was_valid = model.valid;
        model.step(*coin);
        tb.clock_n(1).await?;
        tb.assert_eq(&tb.getv(io.valid), &Logic::from_bool(model.valid), "valid");
        if was_valid {
            tb.assert_eq(&tb.getv(io.state), idle, "state after valid");
        }
    }
    Ok(())
}

pub async fn adder_tb(tb: Tb, io: AdderIo, n: usize) -> Result<(), VerifyError> {
    let w = tb.getv(io.out).width();
    for _ in 0..n {
        let v = tb.setr(&[io.x.id, io.y.id])?;
        tb.clock_n(1).await?;
        let want = from_big(w, &(to_big(&v[0]) + to_big(&v[1])));
        tb.assert_eq(&tb.getv(io.out), &want, "out");
    }
    Ok(())
}

pub async fn full_adder_tb(tb: Tb, io: FullAdderIo, n: usize) -> Result<(), VerifyError> {
    for _ in 0..n {
        let bits: u64 = tb.with_rng(|r| r.gen_range(0..8));
        tb.setv_u64(io.a, bits & 1)?;
        tb.setv_u64(io.b, bits >> 1 & 1)?;
        tb.setv_u64(io.cin, bits >> 2)?;
        tb.clock_n(1).await?;
        let sum = u64::from(bits.count_ones());
        tb.assert_eq(&tb.getv(io.s), &Logic::from_u64(1, sum & 1), "s");
        tb.assert_eq(&tb.getv(io.cout), &Logic::from_u64(1, sum >> 1), "cout");
    }
    Ok(())
}

/// Holds each stimulus for two cycles so the product settles before the
/// register samples it, then checks both the product and the register.
pub async fn wallace_tb(tb: Tb, io: MulIo, n: usize) -> Result<(), VerifyError> {
    let w = tb.getv(io.p).width();
    for _ in 0..n {
        let v = tb.setr(&[io.a.id, io.b.id])?;
        tb.clock_n(2).await?;
        let want = from_big(w, &(to_big(&v[0]) * to_big(&v[1])));
        tb.assert_eq(&tb.getv(io.prod), &want, "prod");
        tb.assert_eq(&tb.getv(io.p), &want, "p");
    }
    Ok(())
}
