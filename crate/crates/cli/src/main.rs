use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndasm::commands::{self, AxiomOptions};
use ndasm::files::CliError;
use ndasm::report::Render;
use ndasm_core::{Limits, RunMode};

/// Run non-deterministic parallel ASMs, evaluate and translate formulas of
/// their one-step modal logic, and check derivations.
#[derive(Parser)]
#[command(name = "ndasm", version)]
struct Cli {
    #[command(flatten)]
    caps: Caps,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Caps {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Largest update-set family a rule may produce.
    #[arg(long, global = true, default_value_t = Limits::default().max_family)]
    max_family: usize,
    /// Largest single update set.
    #[arg(long, global = true, default_value_t = Limits::default().max_set)]
    max_set: usize,
    /// Search nodes allowed per formula evaluation.
    #[arg(long, global = true, default_value_t = Limits::default().max_pred_enum)]
    max_pred_enum: u64,
    /// Largest formula a translation may produce.
    #[arg(long, global = true, default_value_t = Limits::default().max_nodes)]
    max_nodes: usize,
}

impl Caps {
    fn limits(&self) -> Limits {
        Limits {
            max_family: self.max_family,
            max_set: self.max_set,
            max_pred_enum: self.max_pred_enum,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    All,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// List the update sets of the main rule on a state and count successors.
    Step { machine: PathBuf, state: PathBuf },
    /// Explore runs from a state until final states are reached.
    Run {
        machine: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate every formula of a formula file on a state.
    Eval {
        formulas: PathBuf,
        state: PathBuf,
        /// Values for free variables, e.g. `x = a, $n = 2, X = {f(a) := b}`.
        #[arg(long)]
        bindings: Option<String>,
    },
    /// Rewrite every formula into the membership fragment.
    Translate { formulas: PathBuf },
    /// Test axiom schemas on random instances.
    CheckAxioms {
        /// Schema names; all schemas when omitted.
        #[arg(long = "schema")]
        schemas: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// none, a2-without-con or m5-false-on-inconsistent.
        #[arg(long, default_value = "none")]
        mutation: String,
        /// Sample only static formulas for M7 and M8.
        #[arg(long)]
        static_frame: bool,
    },
    /// Check a derivation file line by line.
    ProveCheck { derivation: PathBuf },
}

fn emit<R: Render>(report: &R, json: bool) {
    print!("{}", if json { report.json() } else { report.text() });
}

fn dispatch(cmd: Command, caps: Caps) -> Result<bool, CliError> {
    let limits = caps.limits();
    match cmd {
        Command::Step { machine, state } => {
            emit(&commands::step(&machine, &state, &limits)?, caps.json);
            Ok(true)
        }
        Command::Run { machine, state, max_steps, mode, seed } => {
            let mode = match mode {
                Mode::All => RunMode::All,
                Mode::Sample => RunMode::Sample(seed),
            };
            emit(&commands::run_machine(&machine, &state, max_steps, mode, &limits)?, caps.json);
            Ok(true)
        }
        Command::Eval { formulas, state, bindings } => {
            let rep = commands::eval(&formulas, &state, bindings.as_deref(), &limits)?;
            emit(&rep, caps.json);
            Ok(rep.results.iter().all(|r| r.value))
        }
        Command::Translate { formulas } => {
            emit(&commands::translate(&formulas, &limits)?, caps.json);
            Ok(true)
        }
        Command::CheckAxioms { schemas, trials, seed, mutation, static_frame } => {
            let opts = AxiomOptions { schemas, trials, seed, mutation, static_frame };
            let rep = commands::check_axioms(&opts, &limits)?;
            emit(&rep, caps.json);
            Ok(rep.schemas.iter().all(|s| s.counterexamples == 0))
        }
        Command::ProveCheck { derivation } => {
            let rep = commands::prove_check(&derivation, &limits)?;
            emit(&rep, caps.json);
            Ok(rep.verdict != "rejected")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command, cli.caps) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
