//! Command reports. Each has a JSON form (via serde) and a text form; both
//! list items in canonical order so output is reproducible byte for byte.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateSetEntry {
    pub updates: Vec<String>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub update_sets: Vec<UpdateSetEntry>,
    pub successors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunEnd {
    /// Steps from the start state.
    pub steps: usize,
    /// Locations whose value differs from the start state, as `loc = value`.
    pub changes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: String,
    pub explored: usize,
    pub non_terminating: bool,
    pub terminal: Vec<RunEnd>,
    pub stuck: Vec<RunEnd>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalEntry {
    pub formula: String,
    pub value: bool,
    pub search_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub results: Vec<EvalEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateEntry {
    pub input_nodes: usize,
    pub output_nodes: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateReport {
    pub formulas: Vec<TranslateEntry>,
    /// The translated formula file.
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleEntry {
    pub seed: u64,
    pub state: String,
    pub valuation: String,
    pub instance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub schema: String,
    pub trials: usize,
    pub skipped: usize,
    pub counterexamples: usize,
    pub first: Option<CounterexampleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub mutation: String,
    pub schemas: Vec<SchemaEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineEntry {
    pub step: usize,
    pub line: usize,
    /// `ok`, `ok-modulo-certificates` or `rejected`.
    pub status: String,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofReport {
    pub verdict: String,
    pub lines: Vec<LineEntry>,
}

pub trait Render: Serialize {
    fn text(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }
}

impl Render for StepReport {
    fn text(&self) -> String {
        let mut out = format!("update sets: {}\n", self.update_sets.len());
        for u in &self.update_sets {
            let tag = if u.consistent { "consistent" } else { "inconsistent" };
            let _ = writeln!(out, "  {{{}}}  {tag}", u.updates.join(", "));
        }
        let _ = writeln!(out, "successors: {}", self.successors);
        out
    }
}

fn ends(out: &mut String, what: &str, items: &[RunEnd]) {
    let _ = writeln!(out, "{what}: {}", items.len());
    for (i, e) in items.iter().enumerate() {
        let _ = writeln!(out, "  #{} after {} step(s)", i + 1, e.steps);
        for c in &e.changes {
            let _ = writeln!(out, "    {c}");
        }
    }
}

impl Render for RunSummary {
    fn text(&self) -> String {
        let mut out = format!("mode: {}\nexplored: {}\n", self.mode, self.explored);
        ends(&mut out, "terminal", &self.terminal);
        ends(&mut out, "stuck", &self.stuck);
        let _ = writeln!(out, "non-terminating: {}", self.non_terminating);
        out
    }
}

impl Render for EvalReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.results.iter().enumerate() {
            let _ = writeln!(out, "{}. {}  {}", i + 1, r.value, r.formula);
        }
        out
    }
}

impl Render for TranslateReport {
    fn text(&self) -> String {
        let mut out = self.output.clone();
        for (i, e) in self.formulas.iter().enumerate() {
            let _ = writeln!(
                out,
                "// formula {}: {} -> {} nodes, {} iteration(s)",
                i + 1,
                e.input_nodes,
                e.output_nodes,
                e.iterations
            );
        }
        out
    }
}

impl Render for AxiomReport {
    fn text(&self) -> String {
        let mut out = format!("seed {}  mutation {}\n", self.seed, self.mutation);
        for s in &self.schemas {
            let _ = writeln!(
                out,
                "{:<4} trials {:>4}  skipped {:>3}  counterexamples {}",
                s.schema, s.trials, s.skipped, s.counterexamples
            );
            if let Some(c) = &s.first {
                let _ = writeln!(out, "  first counterexample (seed {}):", c.seed);
                let _ = writeln!(out, "  instance: {}", c.instance);
                if !c.valuation.is_empty() {
                    let _ = writeln!(out, "  valuation: {}", c.valuation);
                }
                for l in c.state.lines() {
                    let _ = writeln!(out, "  | {l}");
                }
            }
        }
        out
    }
}

impl Render for ProofReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            match &l.message {
                Some(m) => {
                    let _ = writeln!(out, "line {}: step {}: {}: {m}", l.line, l.step, l.status);
                }
                None => {
                    let _ = writeln!(out, "line {}: step {}: {}", l.line, l.step, l.status);
                }
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}
