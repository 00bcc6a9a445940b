//! One function per subcommand. Each returns its report and whether the
//! outcome was positive; the caller turns that into exit code 0 or 1.

use std::path::Path;

use ndasm_core::logic::validate::{validate_schema, Mutation, ValidateConfig};
use ndasm_core::logic::{EvalOptions, Evaluator};
use ndasm_core::model::State;
use ndasm_core::proof::{check, LineStatus, SchemaId, Verdict};
use ndasm_core::sample::Shape;
use ndasm_core::syntax::printer::{formula_file_text, location_text, update_text};
use ndasm_core::syntax::{formula_text, parse_bindings, FormulaFile};
use ndasm_core::translate::to_lin;
use ndasm_core::{delta, run, successors, Limits, RunMode, Valuation};

use crate::files::{load_derivation, load_formulas, load_instance, load_state, CertificateStates, CliError};
use crate::report::*;

pub fn step(machine: &Path, state: &Path, limits: &Limits) -> Result<StepReport, CliError> {
    let (m, s) = load_instance(machine, state)?;
    let fam = delta(&m.rule, &s, &Valuation::new(), limits)?;
    let (sig, univ) = (s.signature(), s.universe());
    let update_sets = fam
        .iter()
        .map(|u| UpdateSetEntry {
            updates: u.iter().map(|x| update_text(sig, univ, x)).collect(),
            consistent: u.is_consistent(),
        })
        .collect();
    let successors = successors(&m.rule, &s, limits)?.len();
    Ok(StepReport { update_sets, successors })
}

/// Locations where `to` differs from `from`.
pub fn changes(from: &State, to: &State) -> Vec<String> {
    let (sig, univ) = (from.signature(), from.universe());
    let mut out = Vec::new();
    for f in sig.dynamic_funcs() {
        for ((args, a), (_, b)) in from.graph(f).zip(to.graph(f)) {
            if a != b {
                out.push(format!("{} = {}", location_text(sig, univ, f, &args), univ.name(b)));
            }
        }
    }
    out
}

pub fn run_machine(
    machine: &Path,
    state: &Path,
    max_steps: usize,
    mode: RunMode,
    limits: &Limits,
) -> Result<RunSummary, CliError> {
    let (m, s0) = load_instance(machine, state)?;
    let rep = run(&m, &s0, max_steps, mode, limits)?;
    let end = |path: &Vec<State>| RunEnd { steps: path.len() - 1, changes: changes(&s0, path.last().unwrap()) };
    Ok(RunSummary {
        mode: match mode {
            RunMode::All => "all".into(),
            RunMode::Sample(seed) => format!("sample (seed {seed})"),
        },
        explored: rep.explored,
        non_terminating: rep.non_terminating,
        terminal: rep.terminal.values().map(end).collect(),
        stuck: rep.stuck.values().map(end).collect(),
    })
}

fn same_signature(file: &FormulaFile, s: &State, path: &Path) -> Result<(), CliError> {
    if *file.signature != **s.signature() {
        return Err(CliError::Input(format!(
            "{}: state and formula file declare different functions (names, kinds and order must agree)",
            path.display()
        )));
    }
    Ok(())
}

pub fn eval(formulas: &Path, state: &Path, bindings: Option<&str>, limits: &Limits) -> Result<EvalReport, CliError> {
    let file = load_formulas(formulas)?;
    let s = load_state(state)?;
    same_signature(&file, &s, state)?;
    let val = match bindings {
        Some(b) => parse_bindings(b, &s).map_err(|e| CliError::Input(format!("--bindings: {e}")))?,
        None => Valuation::new(),
    };
    let mut results = Vec::new();
    for f in &file.formulas {
        let ev = Evaluator::new(&s, limits, EvalOptions::default());
        let value = ev.eval(f, &s, &val).map_err(|e| CliError::at(formulas, e))?;
        results.push(EvalEntry { formula: formula_text(f, &file.signature), value, search_nodes: ev.nodes() });
    }
    Ok(EvalReport { results })
}

pub fn translate(formulas: &Path, limits: &Limits) -> Result<TranslateReport, CliError> {
    let file = load_formulas(formulas)?;
    let mut out = FormulaFile { signature: file.signature.clone(), formulas: Vec::new() };
    let mut stats = Vec::new();
    for f in &file.formulas {
        let (g, st) = to_lin(f, &file.signature, limits.max_nodes).map_err(|e| CliError::at(formulas, e))?;
        out.formulas.push(g);
        stats.push(TranslateEntry { input_nodes: st.input_nodes, output_nodes: st.output_nodes, iterations: st.iterations });
    }
    Ok(TranslateReport { formulas: stats, output: formula_file_text(&out) })
}

pub fn mutation_by_name(name: &str) -> Option<Mutation> {
    match name {
        "none" => Some(Mutation::None),
        "a2-without-con" => Some(Mutation::A2WithoutConsistency),
        "m5-false-on-inconsistent" => Some(Mutation::ModalFalseOnInconsistent),
        _ => None,
    }
}

pub struct AxiomOptions {
    pub schemas: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub mutation: String,
    pub static_frame: bool,
}

pub fn check_axioms(opts: &AxiomOptions, limits: &Limits) -> Result<AxiomReport, CliError> {
    let mutation = mutation_by_name(&opts.mutation)
        .ok_or_else(|| CliError::Input(format!("unknown mutation `{}`", opts.mutation)))?;
    let ids: Vec<SchemaId> = if opts.schemas.is_empty() {
        SchemaId::ALL.to_vec()
    } else {
        let mut ids = Vec::new();
        for n in &opts.schemas {
            ids.push(SchemaId::parse(n).ok_or_else(|| CliError::Input(format!("unknown schema `{n}`")))?);
        }
        ids
    };
    let cfg = ValidateConfig {
        trials: opts.trials,
        seed: opts.seed,
        static_frame_only: opts.static_frame,
        shape: Shape::default(),
        ..ValidateConfig::default()
    };
    let mut schemas = Vec::new();
    for id in ids {
        let r = validate_schema(id, mutation, &cfg, limits)?;
        schemas.push(SchemaEntry {
            schema: id.name().into(),
            trials: r.trials,
            skipped: r.skipped,
            counterexamples: r.counterexamples,
            first: r.first.map(|c| CounterexampleEntry {
                seed: c.seed,
                state: c.state,
                valuation: c.valuation,
                instance: c.instance,
            }),
        });
    }
    Ok(AxiomReport { seed: opts.seed, mutation: opts.mutation.clone(), schemas })
}

pub fn prove_check(derivation: &Path, limits: &Limits) -> Result<ProofReport, CliError> {
    let d = load_derivation(derivation)?;
    let mut certs = CertificateStates::beside(derivation);
    let mut resolve = |name: &str| certs.get(name);
    let rep = check(&d, &[], &mut resolve, limits);
    let lines = rep
        .lines
        .iter()
        .map(|l| {
            let (status, message) = match &l.status {
                LineStatus::Ok => ("ok", None),
                LineStatus::OkModuloCertificates => ("ok-modulo-certificates", None),
                LineStatus::Rejected(m) => ("rejected", Some(m.clone())),
            };
            LineEntry { step: l.label, line: l.line, status: status.into(), message }
        })
        .collect();
    let verdict = match rep.verdict() {
        Verdict::Ok => "ok",
        Verdict::OkModuloCertificates => "ok-modulo-certificates",
        Verdict::Rejected => "rejected",
    };
    Ok(ProofReport { verdict: verdict.into(), lines })
}
