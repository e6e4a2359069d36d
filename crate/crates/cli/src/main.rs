//! `treegrowth`: batch front end for growth analysis, oracles, queries and
//! transducer branches.
//!
//! Exit codes: `analyze` returns 0 for polynomial, 2 for exponential and 3
//! for empty support. Every command returns 64 on usage or parse errors, 65
//! when the input data is rejected (alphabet mismatch, caps exceeded, an
//! ambiguous query automaton) and 70 when an internal self-check fails.

mod commands;
mod fail;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fail::Failure;

#[derive(Parser)]
#[command(name = "treegrowth", version, about = "Growth of weighted tree automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// A tree given in a file or inline.
#[derive(Args, Clone)]
struct TreeArg {
    /// File containing the tree.
    #[arg(required_unless_present = "term", conflicts_with = "term")]
    tree: Option<PathBuf>,
    /// The tree itself, e.g. `b(b(c))`.
    #[arg(long)]
    term: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide polynomial or exponential growth and compute the degree.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Emit a witness, checked by evaluation before printing.
        #[arg(long)]
        witness: bool,
        /// Include phase timings (the output is then no longer reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Worker threads; only independent files run in parallel.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
    },
    /// Value of an automaton on a tree.
    Value {
        automaton: PathBuf,
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Number of accepting runs on a tree.
    CountRuns {
        automaton: PathBuf,
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Print the trimmed automaton.
    Trim { automaton: PathBuf },
    /// Brute-force cross-checks over small trees and contexts.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Run-counting reductions for marked-tree queries.
    Query {
        #[command(subcommand)]
        command: QueryCommand,
    },
    /// Macro tree transducers.
    Mtt {
        #[command(subcommand)]
        command: MttCommand,
    },
    /// Print random automata over `{ a:2 b:1 c:0 }`.
    Gen {
        /// Largest number of states.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        states: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        count: u32,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Largest value over trees of each size, as CSV `n,maxValue`.
    Growth {
        automaton: PathBuf,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
        max_size: u32,
    },
    /// First state and context with a self-loop value of at least 2.
    Heavy {
        automaton: PathBuf,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        max_context: u32,
    },
    /// Barbell pairs witnessed by small contexts.
    Barbells {
        automaton: PathBuf,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        max_context: u32,
    },
}

#[derive(Subcommand)]
enum QueryCommand {
    /// Print the run-counting automaton of a query automaton over `a@bits`.
    Bf {
        automaton: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Growth report of the number of query results.
    Growth {
        automaton: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum MttCommand {
    /// Output of the transducer on a tree.
    Eval {
        transducer: PathBuf,
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Branches of the output, one per line.
    Branches {
        transducer: PathBuf,
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Describe the annotated transducer; print it when small enough.
    Hat {
        transducer: PathBuf,
        /// Print the annotated transducer if it has at most this many letters.
        #[arg(long, default_value_t = 0)]
        materialize: u64,
    },
    /// Check on one input that annotated outputs are branches and that the
    /// longest has height + 1 nodes.
    VerifyHeight {
        transducer: PathBuf,
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[arg(long, default_value_t = 10_000_000)]
        work: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { fail::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("treegrowth: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(c: Command) -> Result<u8, Failure> {
    match c {
        Command::Analyze {
            files,
            witness,
            timing,
            format,
            jobs,
        } => commands::analyze(&files, witness, timing, format == Format::Json, jobs as usize),
        Command::Value { automaton, tree } => commands::value(&automaton, &tree, false),
        Command::CountRuns { automaton, tree } => commands::value(&automaton, &tree, true),
        Command::Trim { automaton } => commands::trim(&automaton),
        Command::Oracle { command } => match command {
            OracleCommand::Growth { automaton, max_size } => commands::oracle_growth(&automaton, max_size as usize),
            OracleCommand::Heavy { automaton, max_context } => commands::oracle_heavy(&automaton, max_context as usize),
            OracleCommand::Barbells { automaton, max_context } => {
                commands::oracle_barbells(&automaton, max_context as usize)
            }
        },
        Command::Query { command } => match command {
            QueryCommand::Bf { automaton, max_arity } => commands::query_bf(&automaton, max_arity),
            QueryCommand::Growth {
                automaton,
                max_arity,
                format,
            } => commands::query_growth(&automaton, max_arity, format == Format::Json),
        },
        Command::Mtt { command } => match command {
            MttCommand::Eval { transducer, tree, cap } => commands::mtt_eval(&transducer, &tree, cap),
            MttCommand::Branches { transducer, tree, cap } => commands::mtt_branches(&transducer, &tree, cap),
            MttCommand::Hat {
                transducer,
                materialize,
            } => commands::mtt_hat(&transducer, materialize),
            MttCommand::VerifyHeight {
                transducer,
                tree,
                cap,
                work,
            } => commands::mtt_verify(&transducer, &tree, cap, work),
        },
        Command::Gen { states, seed, count } => commands::gen(states as usize, seed, count as usize),
    }
}
