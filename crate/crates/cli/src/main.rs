// SPDX-License-Identifier: Apache-2.0

//! `boolforge` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check or asserted table row fails,
//! 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use boolforge::bench::{full_depth_report, k_values, render_table1, standard_specs, sweep, to_csv};
use boolforge::netlist::{to_blif, to_dot, to_json};
use boolforge::oracle::bit_string;
use boolforge::{
    equiv_check, generate, metrics, CheckConfig, Error, Operator, OperatorSpec, Variant,
};
use clap::{Parser, Subcommand, ValueEnum};

const USAGE: u8 = 2;
const FAILED: u8 = 1;

#[derive(Parser)]
#[command(
    name = "boolforge",
    version,
    about = "Synthesize and verify basic boolean operator circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Blif,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Build one circuit and print its size and depth.
    Synth {
        op: String,
        #[arg(long)]
        n: usize,
        /// Second parameter; defaults to the largest swept value.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "parallel")]
        variant: String,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check circuits against the reference semantics.
    Check {
        op: String,
        /// A single size or an inclusive range `a..b`.
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "parallel")]
        variant: String,
        #[arg(long, default_value_t = 22)]
        exhaustive_limit: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Defaults to `BOOLFORGE_SEED`, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep every operator and print the bounds table.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sweep rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Size at which measured values are shown.
        #[arg(long, default_value_t = 32)]
        at: usize,
    },
    /// List operators and their parameters.
    List,
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn operator_list() -> String {
    Operator::ALL
        .iter()
        .map(|op| op.name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_op(name: &str) -> Result<Operator, Usage> {
    name.parse().map_err(|_| {
        Usage(format!(
            "unknown operator {name:?}; known operators: {}",
            operator_list()
        ))
    })
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Usage> {
    let bad = || Usage(format!("bad size {text:?}; expected n or a..b"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

fn spec_for(op: Operator, n: usize, k: Option<usize>, variant: Variant) -> OperatorSpec {
    let k = match k {
        Some(k) => k,
        None if op.takes_k() => *k_values(op, n).last().unwrap_or(&0),
        None => 0,
    };
    OperatorSpec::new(op, n, k, variant)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), Usage> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn synth(
    op: &str,
    n: usize,
    k: Option<usize>,
    variant: &str,
    emit: Option<Emit>,
    out: &Option<PathBuf>,
) -> Result<u8, Usage> {
    let op = parse_op(op)?;
    let variant: Variant = variant.parse()?;
    let spec = spec_for(op, n, k, variant);
    let c = generate(&spec)?;
    let m = metrics(&c);
    if let Some(emit) = emit {
        let text = match emit {
            Emit::Json => to_json(&c),
            Emit::Blif => to_blif(&c),
            Emit::Dot => to_dot(&c),
        };
        write_out(out, &text)?;
    }
    let summary = format!(
        "{} n={} variant={} size={} depth={}",
        c.name(),
        n,
        variant,
        m.size,
        m.depth
    );
    if emit.is_some() && out.is_none() {
        eprintln!("{summary}");
    } else {
        println!("{summary}");
    }
    Ok(0)
}

fn check(
    op: &str,
    sizes: &str,
    k: Option<usize>,
    variant: &str,
    cfg: CheckConfig,
) -> Result<u8, Usage> {
    let op = parse_op(op)?;
    let variant: Variant = variant.parse()?;
    let sizes = parse_sizes(sizes)?;
    let specs: Vec<OperatorSpec> = sizes.iter().map(|&n| spec_for(op, n, k, variant)).collect();
    for spec in &specs {
        spec.check_params()?;
    }
    let mut failed = false;
    for spec in &specs {
        let c = generate(spec)?;
        let report = equiv_check(&c, spec, &cfg)?;
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!(
            "{spec}: {verdict} mode={} tested={} failures={} seed={}",
            report.mode, report.tested, report.failure_count, report.seed
        );
        for f in &report.failures {
            let expected: String = f
                .expected
                .iter()
                .map(|e| match e {
                    Some(true) => '1',
                    Some(false) => '0',
                    None => '-',
                })
                .collect();
            println!(
                "  input={} expected={expected} got={}",
                bit_string(&f.input),
                bit_string(&f.got)
            );
        }
        failed |= !report.passed();
    }
    Ok(if failed { FAILED } else { 0 })
}

fn table1(out: &Option<PathBuf>, csv: &Option<PathBuf>, at: usize) -> Result<u8, Usage> {
    let rows = sweep(&standard_specs());
    let depth_rows = full_depth_report();
    write_out(out, &render_table1(&rows, &depth_rows, at))?;
    if let Some(path) = csv {
        let text = to_csv(&rows)?;
        fs::write(path, text)
            .map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| match r.k {
            Some(k) => format!("{} n={} k={k}", r.operator, r.n),
            None => format!("{} n={}", r.operator, r.n),
        })
        .chain(
            depth_rows
                .iter()
                .filter(|r| !r.pass)
                .map(|r| format!("{} n={} depth", r.operator, r.n)),
        )
        .collect();
    if failing.is_empty() {
        Ok(0)
    } else {
        eprintln!(
            "{} asserted rows fail, first: {}",
            failing.len(),
            failing[0]
        );
        Ok(FAILED)
    }
}

fn list() -> u8 {
    for &op in Operator::ALL {
        let mut line = format!("{:<8} n>={}", op.name(), op.min_n());
        if op.takes_k() {
            line.push_str(" k");
        }
        if op.has_variants() {
            line.push_str(" variants=sequential,parallel");
        }
        println!("{line}");
    }
    0
}

fn default_seed() -> Result<u64, Usage> {
    match std::env::var("BOOLFORGE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Usage(format!("BOOLFORGE_SEED={v:?} is not a number"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<u8, Usage> {
    match cli.command {
        Command::Synth {
            op,
            n,
            k,
            variant,
            emit,
            out,
        } => synth(&op, n, k, &variant, emit, &out),
        Command::Check {
            op,
            n,
            k,
            variant,
            exhaustive_limit,
            samples,
            seed,
        } => {
            let cfg = CheckConfig {
                exhaustive_limit,
                samples,
                seed: match seed {
                    Some(s) => s,
                    None => default_seed()?,
                },
                ..CheckConfig::default()
            };
            check(&op, &n, k, &variant, cfg)
        }
        Command::Table1 { out, csv, at } => table1(&out, &csv, at),
        Command::List => Ok(list()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
