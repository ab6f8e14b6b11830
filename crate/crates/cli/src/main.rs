//! `diamcrit`: build, verify and analyze diameter-critical graphs.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 the input fails the
//! property in question, 3 an internal check failed (a bug).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::Format;

#[derive(Debug, Parser, Serialize)]
#[command(name = "diamcrit", version, about = "Diameter-critical graph toolkit")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "DIAMCRIT_THREADS")]
    threads: Option<usize>,
    /// Print the report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    D2Bip,
    D2Trip,
    Dk,
    CliqueMatching,
    Gnp,
    Counterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchObjective {
    Edges,
    Ratio,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Build a member of one of the graph families.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        /// Generator graph for d2-bip / d2-trip (default C5).
        #[arg(long)]
        gen: Option<PathBuf>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        /// `r = x·n` for the counterexample, e.g. `1` or `1/2`.
        #[arg(long, default_value = "1")]
        x: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the graph here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "graph6")]
        format: Format,
        /// Skip the criticality check of the output.
        #[arg(long)]
        no_verify: bool,
    },
    /// Decide whether a graph is diameter-k-critical.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Degree, triple and edge-count statistics of a diameter-k-critical graph.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: u32,
    },
    /// Run the critical-path covering and the pruning checks.
    Cover {
        #[arg(long = "in")]
        input: PathBuf,
        /// Multiplicity threshold (default ⌈n^(2/3)⌉).
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Build the hypergraph chain from the length-3 paths above threshold t.
    Hyper {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for extremal diameter-k-critical graphs.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: SearchMode,
        #[arg(long, value_enum, default_value = "edges")]
        objective: SearchObjective,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Everything that applies to a diameter-k-critical graph, in one report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct { .. } => "construct",
            Command::Verify { .. } => "verify",
            Command::Stats { .. } => "stats",
            Command::Cover { .. } => "cover",
            Command::Hyper { .. } => "hyper",
            Command::Search { .. } => "search",
            Command::Report { .. } => "report",
        }
    }
}

/// A run that did not succeed, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Partial report to print alongside the message.
    pub result: Option<Value>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
            result: None,
        }
    }

    pub fn verdict(message: impl Into<String>, result: Value) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
            result: Some(result),
        }
    }
}

impl From<diamcrit::Error> for Failure {
    fn from(e: diamcrit::Error) -> Failure {
        use diamcrit::Error as E;
        let code = if e.is_bug_signal() {
            3
        } else if matches!(e, E::NotDiameterCritical(_) | E::PreconditionFailed(_)) {
            2
        } else {
            1
        };
        Failure {
            code,
            message: e.to_string(),
            result: None,
        }
    }
}

fn status(code: u8) -> &'static str {
    match code {
        0 => "ok",
        2 => "fails",
        3 => "bug",
        _ => "error",
    }
}

fn print_human(result: &Value) {
    if let Value::Object(map) = result {
        for (k, v) in map {
            match v {
                Value::String(s) => println!("{k}: {s}"),
                other => println!("{k}: {other}"),
            }
        }
    } else if !result.is_null() {
        println!("{result}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = commands::dispatch(&cli.command, cli.json);
    let (code, result, message) = match outcome {
        Ok(result) => (0, result, None),
        Err(f) => (f.code, f.result.unwrap_or(Value::Null), Some(f.message)),
    };
    if cli.json {
        let mut envelope = json!({
            "tool": "diamcrit",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command.name(),
            "config": &cli,
            "status": status(code),
            "exit_code": code,
            "result": result,
        });
        if let Some(m) = &message {
            envelope["message"] = Value::String(m.clone());
        }
        println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable"));
    } else {
        print_human(&result);
        if let Some(m) = &message {
            eprintln!("{}: {m}", status(code));
        }
    }
    ExitCode::from(code)
}
