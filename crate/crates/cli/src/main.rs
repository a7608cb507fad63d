mod cli;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use nusat_core::analysis::{bounds_report, default_snake_size, predict_threshold};
use nusat_core::dimacs::{from_dimacs, write_dimacs, DimacsMode};
use nusat_core::dist::instantiate;
use nusat_core::formula::Formula;
use nusat_core::generator::{sample_formula, GeneratorConfig};
use nusat_core::solver::{solve2, solve_brute, SolveResult};
use nusat_core::witness::{count_snake_occurrences, find_bicycle, full_sign_core};
use nusat_core::xlab::SweepConfig;

use cli::{Cli, Command, Find};

pub const SCHEMA_VERSION: u32 = 1;

/// A problem with the invocation rather than the work; exits 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(command: &str, body: T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &Envelope { schema_version: SCHEMA_VERSION, command, body })?;
    writeln!(out)?;
    Ok(())
}

fn read_formula(path: &str, mode: DimacsMode) -> Result<Formula> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .with_context(|| format!("reading {path}"))?;
    }
    from_dimacs(&text, mode).with_context(|| format!("parsing {path}"))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => {
            let d = instantiate(&a.dist.dist, a.dist.n)?;
            let cfg = GeneratorConfig { seed: a.seed, retry_cap: a.retry_cap };
            let f = d.to_user(&sample_formula(&d, a.k, a.m, &cfg)?);
            if a.output == "-" {
                write_dimacs(&f, io::stdout().lock())?;
            } else {
                let file = File::create(&a.output).with_context(|| format!("creating {}", a.output))?;
                write_dimacs(&f, BufWriter::new(file))?;
            }
            Ok(0)
        }
        Command::Solve(a) => {
            let mode = if a.permissive { DimacsMode::Permissive } else { DimacsMode::Strict { k: None } };
            let f = read_formula(&a.input, mode)?;
            let result = if a.brute { solve_brute(&f)? } else { solve2(&f)? };
            let body = match &result {
                SolveResult::Sat { assignment } => json!({
                    "status": "SAT",
                    "assignment": assignment
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
                        .collect::<Vec<_>>(),
                }),
                SolveResult::Unsat { witness } => json!({ "status": "UNSAT", "witness_var": witness }),
            };
            emit("solve", body)?;
            Ok(result.status().exit_code() as u8)
        }
        Command::Witness(a) => {
            let f = read_formula(&a.input, DimacsMode::Strict { k: None })?;
            let (name, witness) = match a.find {
                Find::Bicycle => (
                    "bicycle".to_string(),
                    find_bicycle(&f, a.t_max)?.map(|b| {
                        json!({ "t": b.t(), "w": b.w, "u": b.u, "v": b.v, "clause_indices": b.clause_indices })
                    }),
                ),
                Find::Snake(t) => {
                    let census = count_snake_occurrences(&f, t)?;
                    let witness = (!census.classes.is_empty()).then(|| {
                        let classes: Vec<Value> = census
                            .classes
                            .iter()
                            .map(|(s, o)| {
                                json!({ "snake": s.literals(), "multiplicity": o.multiplicity, "exactly_once": o.exactly_once })
                            })
                            .collect();
                        json!({
                            "t": t,
                            "classes": classes,
                            "exactly_once_sequences": census.exactly_once_sequences(),
                        })
                    });
                    (format!("snake:{t}"), witness)
                }
                Find::Core => {
                    let k = a.k.or(f.arity()).unwrap_or(2);
                    ("core".to_string(), full_sign_core(&f, k).map(|vars| json!({ "k": k, "vars": vars })))
                }
            };
            emit("witness", json!({ "find": name, "witness": witness }))?;
            Ok(0)
        }
        Command::Threshold(a) => {
            let d = instantiate(&a.dist.dist, a.dist.n)?;
            let report = predict_threshold(&d);
            if !report.sharp {
                eprintln!("note: {}", report.note);
            }
            emit("threshold", json!({ "ensemble": a.dist.dist.to_string(), "report": report }))?;
            Ok(0)
        }
        Command::Bounds(a) => {
            let d = instantiate(&a.dist.dist, a.dist.n)?;
            let t = a.t.unwrap_or_else(|| default_snake_size(&d));
            let report = bounds_report(&d, a.m, t, a.t_max.unwrap_or(d.n()));
            emit("bounds", json!({ "ensemble": a.dist.dist.to_string(), "report": report }))?;
            Ok(0)
        }
        Command::Sweep(a) => {
            let s = config::sweep(a)?;
            let mut cfg = SweepConfig::new(s.common.spec, s.n, s.grid, s.trials, s.common.seed);
            cfg.confidence = s.confidence;
            let out = s.common.lab.run_sweep(&cfg)?;
            if out.redraws > 0 {
                eprintln!("warning: {} trials re-drawn after hitting the generator retry cap", out.redraws);
            }
            out.write_csv(io::stdout().lock())?;
            Ok(0)
        }
        Command::Crossing(a) => {
            let c = config::crossing(a)?;
            let est = c.common.lab.estimate_crossing(&c.common.spec, c.n, c.common.seed, c.budget)?;
            emit("crossing", json!({ "ensemble": c.common.spec.to_string(), "seed": c.common.seed, "estimate": est }))?;
            Ok(0)
        }
        Command::Sharpness(a) => {
            let s = config::sharpness(a)?;
            let report =
                s.common.lab.sharpness_probe(&s.common.spec, &s.n_grid, s.delta, s.budget, s.common.seed)?;
            emit("sharpness", json!({ "ensemble": s.common.spec.to_string(), "seed": s.common.seed, "report": report }))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("nusat: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 2 } else { 3 })
        }
    }
}
