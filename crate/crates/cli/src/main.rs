//! `spic`: parse, check, analyze, run and monitor synchronous π-calculus
//! programs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Version of every JSON document the tool prints.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "spic", version, about = "Toolchain for the synchronous pi-calculus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a program and print it back in normal form.
    Parse(Program),
    /// Typecheck a program and print the types of its read labels.
    Typecheck(Program),
    /// Call graphs, read-once check, auxiliary parameters and orders.
    Analyze {
        #[command(flatten)]
        program: Program,
        /// Write both call graphs in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// The inequalities a quasi-interpretation must satisfy.
    Constraints(Program),
    /// The program as a term-rewriting system.
    Abstract(Program),
    /// Check an assignment against the constraints of a program.
    CheckQi {
        #[command(flatten)]
        program: Program,
        /// Assignment file; defaults to `<program>.qi.json` next to the program.
        #[arg(long)]
        qi: Option<PathBuf>,
        /// Largest value size tried when enumerating substitutions.
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Run a program instant by instant.
    Run {
        #[command(flatten)]
        program: Program,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Per-instant sizes and steps over a run, with a trend verdict.
    Monitor {
        #[command(flatten)]
        program: Program,
        #[command(flatten)]
        run: RunArgs,
        /// Size of each generated input value.
        #[arg(long, default_value_t = 3)]
        value_size: u64,
        /// Generated input values per signal and instant.
        #[arg(long, default_value_t = 2)]
        count: usize,
    },
}

#[derive(Args, Debug)]
pub struct Program {
    /// Program file (`.spi`).
    pub path: PathBuf,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Number of instants (default 10 for `run`, 50 for `monitor`).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub instants: Option<u64>,
    /// Seed for the scheduler and for generated inputs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reductions allowed per instant before it counts as non-suspending.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub step_cap: u64,
    /// Input schedule: a JSON list of per-instant emission lists.
    #[arg(long)]
    pub env: Option<PathBuf>,
}

/// Why a command did not succeed, and the matching exit status.
#[derive(Debug)]
pub enum Failure {
    /// A check failed: syntax or type errors, a rejected analysis, a
    /// refuted constraint, an instant that did not suspend.
    Check(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    // Runs of non-reactive programs can build deeply nested values.
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(move || commands::dispatch(&cli));
    let outcome = match worker {
        Ok(handle) => handle.join(),
        Err(e) => {
            eprintln!("internal error: {e}");
            return ExitCode::from(3);
        }
    };
    match outcome {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err((out, failure))) => {
            print!("{out}");
            match &failure {
                Failure::Check(m) | Failure::Usage(m) if !m.is_empty() => eprintln!("error: {m}"),
                _ => {}
            }
            ExitCode::from(failure.code())
        }
        Err(_) => ExitCode::from(3),
    }
}
