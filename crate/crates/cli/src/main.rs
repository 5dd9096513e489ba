//! `sofic-dyck`: zeta functions, periodic point counts and constructions
//! for sofic-Dyck shifts.
//!
//! Exit status: 0 success, 1 validation or parse failure, 2 cross-check
//! mismatch, 3 resource guard.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::{Failure, RunReport};

#[derive(Parser, Debug)]
#[command(name = "sofic-dyck", version, about = "Zeta functions of sofic-Dyck shifts")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Oracle,
    Formula,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

/// Inputs are file paths or embedded fixtures such as `@fix-ex1`.
#[derive(Subcommand, Debug)]
enum Command {
    /// Check an automaton file.
    Validate { file: String },
    /// Zeta function via exterior-power determinants.
    Zeta {
        file: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Use the automaton as given instead of its reductions.
        #[arg(long)]
        no_reduce: bool,
        /// Compare p_n with brute-force enumeration where feasible.
        #[arg(long)]
        cross_check: bool,
    },
    /// Table of periodic point counts p_n.
    Periodic {
        file: String,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
    },
    /// Left or right reduction.
    Reduce {
        file: String,
        #[arg(long, value_enum, default_value_t = Side::Left)]
        side: Side,
        /// Output automaton; the state contents go to `<out>.states.json`.
        #[arg(short = 'o')]
        out: Option<String>,
    },
    /// State pairs joined by an admissible path with the given label.
    Rel {
        file: String,
        #[arg(long)]
        word: String,
    },
    /// Whether a word labels an admissible path.
    Admissible {
        file: String,
        #[arg(long)]
        word: String,
    },
    /// Equivalent visibly pushdown automaton.
    Vpa {
        file: String,
        #[arg(short = 'o')]
        out: Option<String>,
    },
    /// Dyck automaton of a visibly pushdown grammar.
    FromGrammar {
        file: String,
        #[arg(short = 'o')]
        out: Option<String>,
    },
    /// Dyck automaton of a finite-type-Dyck specification.
    Ftd {
        file: String,
        #[arg(short = 'o')]
        out: Option<String>,
    },
    /// Search for a periodic point of period at most the bound.
    Nonempty {
        file: String,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
}

impl Command {
    fn file(&self) -> &str {
        match self {
            Command::Validate { file }
            | Command::Zeta { file, .. }
            | Command::Periodic { file, .. }
            | Command::Reduce { file, .. }
            | Command::Rel { file, .. }
            | Command::Admissible { file, .. }
            | Command::Vpa { file, .. }
            | Command::FromGrammar { file, .. }
            | Command::Ftd { file, .. }
            | Command::Nonempty { file, .. } => file,
        }
    }
}

fn run(cmd: &Command, inp: &input::Input) -> commands::CmdResult {
    match cmd {
        Command::Validate { .. } => commands::validate(inp),
        Command::Zeta { order, no_reduce, cross_check, .. } => commands::zeta(inp, *order, *no_reduce, *cross_check),
        Command::Periodic { max_n, method, .. } => commands::periodic(inp, *max_n, *method),
        Command::Reduce { side, out, .. } => commands::reduce(inp, *side, out.as_deref()),
        Command::Rel { word, .. } => commands::rel(inp, word),
        Command::Admissible { word, .. } => commands::admissible(inp, word),
        Command::Vpa { out, .. } => commands::vpa(inp, out.as_deref()),
        Command::FromGrammar { out, .. } => commands::from_grammar(inp, out.as_deref()),
        Command::Ftd { out, .. } => commands::ftd(inp, out.as_deref()),
        Command::Nonempty { bound, .. } => commands::nonempty(inp, *bound),
    }
}

fn main() -> ExitCode {
    // usage errors are input errors; clap's own status 2 means mismatch here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let argv: Vec<String> = std::env::args().collect();

    let (inp, outcome) = match input::read(cli.command.file()) {
        Ok(inp) => {
            let outcome = run(&cli.command, &inp);
            (Some(inp), outcome)
        }
        Err(f) => (None, Err(f)),
    };
    let (lines, results, failure) = match outcome {
        Ok(out) => (out.lines, Some(out.data), out.failure),
        Err(f) => (Vec::new(), None, Some(f)),
    };
    let status = failure.as_ref().map_or(0, Failure::exit_code);

    match cli.format {
        Format::Text => {
            if let Some(inp) = &inp {
                println!("input: {} (sha256 {})", inp.name, inp.sha256);
            }
            for l in &lines {
                println!("{l}");
            }
            if let Some(f) = &failure {
                eprintln!("error: {}", f.message());
            }
        }
        Format::Json => {
            let report = RunReport {
                command: argv,
                input: inp,
                results,
                error: failure.as_ref().map(|f| f.message().to_string()),
                status,
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }
    ExitCode::from(status as u8)
}
