//! Command-line front end.

use crate::bench::{self, BenchOpts, SWEEP};
use crate::checks;
use crate::examples::{self, parse_param, CliError, Example, RunOpts};
use clap::{Parser, Subcommand};
use hgl::emit::emit_verilog;
use hgl::sim::Strategy;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "hgl", version, about = "Hardware generation and three-state simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an example with its test bench.
    Run {
        example: Example,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
        /// Defaults to $HGL_SEED, then 1.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        vcd: Option<PathBuf>,
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long, default_value = "optimized")]
        strategy: Strategy,
        /// Design parameter, e.g. `w=16`. Repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
    },
    /// Measure Wallace multiplier throughput per strategy.
    Bench {
        #[arg(long, default_value_t = 32)]
        width: usize,
        #[arg(long, default_value_t = 1000)]
        n_stimuli: usize,
        /// Probability that a stimulus carries an X bit, or `sweep`.
        #[arg(long, default_value = "0")]
        x_ratio: String,
        #[arg(long, value_delimiter = ',', default_value = "optimized,always_full,binary_only")]
        strategies: Vec<Strategy>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write SystemVerilog and a short waveform for an example.
    Emit {
        example: Example,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
    },
    /// Run the built-in checks.
    Selftest {
        /// Check numbers to run; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("HGL_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("HGL_SEED=`{v}` is not an integer"))),
        Err(_) => Ok(1),
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn x_ratios(s: &str) -> Result<Vec<f64>, CliError> {
    if s == "sweep" {
        return Ok(SWEEP.to_vec());
    }
    let x: f64 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("--x-ratio expects a number in [0, 1] or `sweep`, got `{s}`")))?;
    if !(0.0..=1.0).contains(&x) {
        return Err(CliError::Usage(format!("--x-ratio {x} out of [0, 1]")));
    }
    Ok(vec![x])
}

fn csv(rows: &[bench::BenchRow]) -> String {
    let mut s = String::from("strategy,x_ratio,cycles,gates,fast_execs,full_execs,events,wall_s,cps,ns_per_exec\n");
    for r in rows {
        s += &format!(
            "{},{:.2},{},{},{},{},{},{:.6},{:.1},{:.3}\n",
            r.strategy.name(),
            r.x_ratio,
            r.cycles,
            r.gates,
            r.stats.fast_execs,
            r.stats.full_execs,
            r.stats.events,
            r.wall.as_secs_f64(),
            r.cps(),
            r.ns_per_exec()
        );
    }
    s
}

/// Runs a parsed command, writing reports to `out` and warnings to `err`.
/// Returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match cli.command {
        Command::Run {
            example,
            cycles,
            seed,
            vcd,
            ledger,
            strategy,
            params,
        } => {
            let opts = RunOpts {
                example,
                cycles,
                seed: seed_or_env(seed)?,
                strategy,
                params,
            };
            let r = examples::run(&opts)?;
            if let Some(p) = vcd {
                write_file(&p, &r.vcd)?;
            }
            if let Some(p) = ledger {
                write_file(&p, &r.ledger.to_string())?;
            }
            write!(out, "{}", r.summary(&opts)).map_err(io)?;
            Ok(i32::from(r.ledger.failed() > 0))
        }
        Command::Bench {
            width,
            n_stimuli,
            x_ratio,
            strategies,
            seed,
            repeat,
            csv: csv_path,
        } => {
            if !(1..=128).contains(&width) {
                return Err(CliError::Usage(format!("--width {width} out of range 1..=128")));
            }
            let x_ratios = x_ratios(&x_ratio)?;
            if strategies.contains(&Strategy::BinaryOnly) && x_ratios.iter().any(|x| *x > 0.0) {
                writeln!(err, "warning: binary_only ignores X; its results at x_ratio > 0 are not three-state accurate")
                    .map_err(io)?;
            }
            let opts = BenchOpts {
                width,
                n_stimuli,
                x_ratios,
                strategies,
                seed: seed_or_env(seed)?,
                repeat,
            };
            let rows = bench::run(&opts)?;
            if let Some(p) = csv_path {
                write_file(&p, &csv(&rows))?;
            }
            write!(out, "{}\n{}", bench::kv(&opts, &rows), bench::table(&rows)).map_err(io)?;
            Ok(0)
        }
        Command::Emit { example, out: dir, params } => {
            std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let d = examples::design_only(example, &params)?;
            let v = emit_verilog(&d, "top").map_err(|e| CliError::Build(format!("{e:?}")))?;
            let lint = v.lint();
            for l in &lint {
                writeln!(err, "lint: {l}").map_err(io)?;
            }
            let sv = dir.join(format!("{example}.sv"));
            write_file(&sv, &v.render())?;
            let r = examples::run(&RunOpts {
                example,
                cycles: 10,
                seed: 1,
                strategy: Strategy::Optimized,
                params,
            })?;
            let vcd = dir.join(format!("{example}.vcd"));
            write_file(&vcd, &r.vcd)?;
            writeln!(out, "verilog={}\nvcd={}\nmodules={}\nlint={}", sv.display(), vcd.display(), v.units.len(), lint.len())
                .map_err(io)?;
            Ok(i32::from(!lint.is_empty()))
        }
        Command::Selftest { only } => {
            let ids: Vec<u32> = if only.is_empty() { (1..=10).collect() } else { only };
            if let Some(bad) = ids.iter().find(|i| !(1..=10).contains(*i)) {
                return Err(CliError::Usage(format!("no check {bad}")));
            }
            let mut failed = 0;
            for id in ids {
                let o = checks::run(id, &in_process);
                writeln!(out, "{}", o.line()).map_err(io)?;
                failed += usize::from(!o.passed());
            }
            writeln!(out, "failed={failed}").map_err(io)?;
            Ok(i32::from(failed > 0))
        }
    }
}

/// Runs the CLI on `args` (without the program name) in this process and
/// returns its standard output.
pub fn in_process(args: &[String]) -> Result<Vec<u8>, String> {
    let argv = std::iter::once("hgl".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let mut err = Vec::new();
    match execute(cli, &mut out, &mut err) {
        Ok(0) => Ok(out),
        Ok(code) => Err(format!("exit {code}: {}", String::from_utf8_lossy(&out))),
        Err(e) => Err(e.to_string()),
    }
}

/// Entry point for the binary.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hgl: {e}");
            match e {
                CliError::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}
