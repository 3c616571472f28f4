//! Wallace-tree multiplier throughput under the three gate-function
//! strategies.

use crate::examples::{build, CliError, Example, Handles};
use hgl::builder::Design;
use hgl::designs::MulIo;
use hgl::logic::{Bit, Logic};
use hgl::sim::{Simulator, Stats, Strategy};
use hgl::verify::{random_logic, CLOCK_HALF_PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;
use std::time::{Duration, Instant};

/// X ratios visited by a sweep, i.e. binary-stimulus ratios 0, 0.25, ... 1.
pub const SWEEP: [f64; 5] = [1.0, 0.75, 0.5, 0.25, 0.0];

/// Keys whose values depend on wall time.
pub const TIMING_KEYS: [&str; 3] = ["wall_s", "cps", "ns_per_exec"];

#[derive(Debug, Clone)]
pub struct BenchOpts {
    pub width: usize,
    pub n_stimuli: usize,
    pub x_ratios: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    /// Timed repetitions per point; the fastest is reported.
    pub repeat: usize,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub x_ratio: f64,
    pub cycles: usize,
    pub gates: usize,
    /// Counters from the timed part only.
    pub stats: Stats,
    pub wall: Duration,
    /// Hash of the registered product after every cycle.
    pub checksum: u64,
}

impl BenchRow {
    pub fn cps(&self) -> f64 {
        self.cycles as f64 / self.wall.as_secs_f64()
    }

    /// Wall time per gate execution.
    pub fn ns_per_exec(&self) -> f64 {
        self.wall.as_secs_f64() * 1e9 / self.stats.gate_execs().max(1) as f64
    }
}

/// `n` operand pairs. With probability `x_ratio` a pair carries one X bit
/// at a uniform position among its `2 * width` bits.
pub fn stimuli(width: usize, n: usize, x_ratio: f64, seed: u64) -> Vec<(Logic, Logic)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut a = random_logic(&mut rng, width);
            let mut b = random_logic(&mut rng, width);
            if rng.gen_bool(x_ratio) {
                let i = rng.gen_range(0..2 * width);
                if i < width {
                    a.set_bit(i, Bit::X);
                } else {
                    b.set_bit(i - width, Bit::X);
                }
            }
            (a, b)
        })
        .collect()
}

fn fnv(h: u64, words: &[u64]) -> u64 {
    words.iter().fold(h, |h, w| (h ^ w).wrapping_mul(0x100_0000_01b3))
}

/// Runs one clock cycle per stimulus. Operands change on the falling edge;
/// the first cycle, which settles the initial state, is not timed.
pub fn run_one(design: &Design, io: &MulIo, stim: &[(Logic, Logic)], strategy: Strategy) -> Result<BenchRow, CliError> {
    let err = |e: hgl::sim::SimError| CliError::Sim(e.to_string());
    let clk = design.clock.expect("default clock").clk;
    let period = 2 * CLOCK_HALF_PERIOD;
    let mut sim = Simulator::new(&design.graph, strategy).map_err(err)?;
    sim.add_clock(clk, CLOCK_HALF_PERIOD);
    sim.run_until(period - 1).map_err(err)?;
    sim.reset_stats();
    let mut checksum = 0xcbf2_9ce4_8422_2325;
    let start = Instant::now();
    for (i, (a, b)) in stim.iter().enumerate() {
        let t = period * (i as u64 + 1);
        sim.schedule(t, io.a.id, a).map_err(err)?;
        sim.schedule(t, io.b.id, b).map_err(err)?;
        sim.run_until(t + period - 1).map_err(err)?;
        let p = sim.get(io.p.id);
        checksum = fnv(fnv(checksum, p.value_plane()), p.unknown_plane());
    }
    let wall = start.elapsed();
    Ok(BenchRow {
        strategy,
        x_ratio: 0.0,
        cycles: stim.len(),
        gates: sim.gate_count(),
        stats: sim.stats().clone(),
        wall,
        checksum,
    })
}

pub fn wallace(width: usize) -> Result<(Design, MulIo), CliError> {
    let b = build(Example::Wallace, &[("w".to_string(), width as i64)])?;
    match b.handles {
        Handles::Wallace(io) => Ok((b.design, io)),
        _ => unreachable!(),
    }
}

/// Every (x ratio, strategy) point of `opts`, in order. Repetitions go
/// round-robin over the points so slow drift in machine speed hits all of
/// them alike.
pub fn run(opts: &BenchOpts) -> Result<Vec<BenchRow>, CliError> {
    let (design, io) = wallace(opts.width)?;
    let stims: Vec<Vec<(Logic, Logic)>> = (0..opts.x_ratios.len())
        .map(|k| stimuli(opts.width, opts.n_stimuli, opts.x_ratios[k], opts.seed.wrapping_add(k as u64)))
        .collect();
    let mut best: Vec<Option<BenchRow>> = vec![None; opts.x_ratios.len() * opts.strategies.len()];
    for _ in 0..opts.repeat.max(1) {
        for (k, &x) in opts.x_ratios.iter().enumerate() {
            for (j, &s) in opts.strategies.iter().enumerate() {
                let mut row = run_one(&design, &io, &stims[k], s)?;
                row.x_ratio = x;
                let slot = &mut best[k * opts.strategies.len() + j];
                if slot.as_ref().is_none_or(|b| row.wall < b.wall) {
                    *slot = Some(row);
                }
            }
        }
    }
    Ok(best.into_iter().map(|r| r.expect("at least one repetition")).collect())
}

/// One `key=value` line per measurement, prefixed by the point.
pub fn kv(opts: &BenchOpts, rows: &[BenchRow]) -> String {
    let mut s = String::new();
    writeln!(s, "design=wallace").unwrap();
    writeln!(s, "width={}", opts.width).unwrap();
    writeln!(s, "n_stimuli={}", opts.n_stimuli).unwrap();
    writeln!(s, "seed={}", opts.seed).unwrap();
    for r in rows {
        let p = format!("{}.x{:.2}", r.strategy.name(), r.x_ratio);
        writeln!(s, "{p}.gates={}", r.gates).unwrap();
        writeln!(s, "{p}.cycles={}", r.cycles).unwrap();
        for (k, v) in r.stats.pairs() {
            writeln!(s, "{p}.{k}={v}").unwrap();
        }
        writeln!(s, "{p}.checksum={:016x}", r.checksum).unwrap();
        writeln!(s, "{p}.wall_s={:.6}", r.wall.as_secs_f64()).unwrap();
        writeln!(s, "{p}.cps={:.1}", r.cps()).unwrap();
        writeln!(s, "{p}.ns_per_exec={:.3}", r.ns_per_exec()).unwrap();
    }
    s
}

/// The `key=value` lines of a report whose key is not a timing
/// measurement.
pub fn without_timings(report: &str) -> String {
    report
        .lines()
        .filter(|l| match l.split_once('=') {
            Some((key, _)) => !TIMING_KEYS.iter().any(|t| key.ends_with(&format!(".{t}"))),
            None => false,
        })
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn table(rows: &[BenchRow]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<12} {:>7} {:>12} {:>12} {:>12} {:>10} {:>12}",
        "strategy", "x_ratio", "fast_execs", "full_execs", "cps", "ns/exec", "vs full"
    )
    .unwrap();
    for r in rows {
        let full = rows
            .iter()
            .find(|o| o.strategy == Strategy::AlwaysFull && o.x_ratio == r.x_ratio)
            .map(|o| format!("{:.2}x", r.cps() / o.cps()))
            .unwrap_or_else(|| "-".into());
        writeln!(
            s,
            "{:<12} {:>7.2} {:>12} {:>12} {:>12.1} {:>10.3} {:>12}",
            r.strategy.name(),
            r.x_ratio,
            r.stats.fast_execs,
            r.stats.full_execs,
            r.cps(),
            r.ns_per_exec(),
            full
        )
        .unwrap();
    }
    s
}
