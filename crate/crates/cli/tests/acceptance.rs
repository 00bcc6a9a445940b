//! Acceptance run: one PASS/FAIL line per criterion, followed by the failing
//! sub-checks. Known defects of the formal system make some criteria fail;
//! the process exits non-zero only when the set of failing sub-checks
//! differs from `KNOWN_FAILURES`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ndasm::commands::prove_check;
use ndasm::files::{load_formulas, load_instance, load_state};
use ndasm::report::*;
use ndasm_core::logic::lemmas::{check_lemma, Lemma, LemmaConfig};
use ndasm_core::logic::validate::{validate_schema, Mutation, ValidateConfig};
use ndasm_core::logic::{eval, EvalOptions, Evaluator};
use ndasm_core::model::{Elem, Sort, State};
use ndasm_core::proof::SchemaId;
use ndasm_core::sample::{Sampler, Scope, Shape};
use ndasm_core::syntax::{is_flat, is_membership_fragment};
use ndasm_core::translate::to_lin;
use ndasm_core::{run, successors, Limits, RunMode, Valuation};

/// Sub-checks expected to fail, each because the property as stated is false.
const KNOWN_FAILURES: &[&str] = &[
    // frame axioms fail for pure φ mentioning dynamic functions
    "3/M7",
    "3/M8",
    // [X] is vacuous on inconsistent X, so A2 needs no guard
    "3/control:a2-without-con",
    // the printed bracketing of box distribution
    "4/box-distribution-as-printed",
    // φ → [r]φ only for static φ
    "4/any-formula-survives-rules",
    // wcon of par and forall with non-deterministic subrules
    "4/witness:counterexamples.asml#1",
    "4/witness:counterexamples.asml#2",
];

const SEED: u64 = 2024;
const AXIOM_TRIALS: usize = 1000;
const LEMMA_PAIRS: usize = 100;
const TRANSLATION_FORMULAS: u64 = 200;
const TRANSLATION_STATES: usize = 20;

struct Check {
    id: String,
    ok: bool,
    note: String,
}

impl Check {
    fn new(id: impl Into<String>, ok: bool, note: impl Into<String>) -> Check {
        Check { id: id.into(), ok, note: note.into() }
    }
}

struct Outcome {
    checks: Vec<Check>,
    info: Vec<String>,
    summary: String,
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn limits() -> Limits {
    Limits::default()
}

fn elem(s: &State, name: &str) -> Elem {
    s.universe().lookup(name).unwrap_or_else(|| panic!("no atom `{name}`"))
}

// ---------------------------------------------------------------- 1

fn words_state(s0: &State, v: &[usize], w: &[usize]) -> State {
    let sig = s0.signature();
    let (fv, fw) = (sig.lookup("v").unwrap(), sig.lookup("w").unwrap());
    let mut t = s0.clone();
    for (pos, (a, b)) in v.iter().zip(w).enumerate() {
        t.set(fv, &[elem(s0, &pos.to_string())], elem(s0, &a.to_string())).unwrap();
        t.set(fw, &[elem(s0, &pos.to_string())], elem(s0, &b.to_string())).unwrap();
    }
    t
}

fn criterion_1() -> Outcome {
    let dir = corpus().join("words");
    let (m, s0) = load_instance(&dir.join("words.asmr"), &dir.join("blank.asms")).unwrap();
    let got = successors(&m.rule, &s0, &limits()).unwrap();

    // nested loops over every choice the rule can make
    let letters = [0usize, 1];
    let mut oracle = BTreeSet::new();
    for n in 0..3usize {
        for i in 0..n {
            for &a in &letters {
                for &b in &letters {
                    if a == b {
                        continue;
                    }
                    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                    let rows = others.len();
                    for code in 0..(4usize.pow(rows as u32)) {
                        let mut v = vec![9; n];
                        let mut w = vec![9; n];
                        v[i] = a;
                        w[i] = b;
                        for (k, &j) in others.iter().enumerate() {
                            let digit = (code >> (2 * k)) & 3;
                            v[j] = digit & 1;
                            w[j] = digit >> 1;
                        }
                        oracle.insert(words_state(&s0, &v, &w));
                    }
                }
            }
        }
    }

    // the characterisation: distinct words of equal length over {0, 1}
    let mut words = BTreeSet::new();
    for len in 1..3u32 {
        for x in 0..(1usize << len) {
            for y in 0..(1usize << len) {
                if x != y {
                    let bits = |z: usize| (0..len as usize).map(|k| (z >> k) & 1).collect::<Vec<_>>();
                    words.insert(words_state(&s0, &bits(x), &bits(y)));
                }
            }
        }
    }
    Outcome {
        checks: vec![
            Check::new("1/oracle", got == oracle, format!("{} successors, oracle {}", got.len(), oracle.len())),
            Check::new("1/characterisation", got == words, format!("{} word pairs", words.len())),
        ],
        info: vec![],
        summary: format!("{} successor states, set-equal to both oracles", got.len()),
    }
}

// ---------------------------------------------------------------- 2

struct Graph {
    nodes: Vec<Elem>,
    /// (edge atom, endpoints in canonical order, weight)
    edges: Vec<(Elem, (Elem, Elem), u64)>,
}

fn graph(s: &State) -> Graph {
    let sig = s.signature();
    let univ = s.universe();
    let f = |n: &str| sig.lookup(n).unwrap();
    let t = univ.true_elem();
    let nodes = univ.carrier(Sort::Primary).filter(|&x| s.get(f("V"), &[x]) == t).collect();
    let edges = univ
        .carrier(Sort::Primary)
        .filter(|&x| s.get(f("E"), &[x]) == t)
        .map(|x| {
            let (a, b) = (s.get(f("first"), &[x]), s.get(f("second"), &[x]));
            let w: u64 = univ.name(s.get(f("weight"), &[x])).parse().unwrap();
            (x, (a.min(b), a.max(b)), w)
        })
        .collect();
    Graph { nodes, edges }
}

fn spanning_tree(nodes: &[Elem], edges: &[(Elem, Elem)]) -> bool {
    if edges.len() + 1 != nodes.len() {
        return false;
    }
    let mut root: BTreeMap<Elem, Elem> = nodes.iter().map(|&n| (n, n)).collect();
    fn find(root: &mut BTreeMap<Elem, Elem>, x: Elem) -> Elem {
        let p = root[&x];
        if p == x {
            return x;
        }
        let r = find(root, p);
        root.insert(x, r);
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra == rb {
            return false;
        }
        root.insert(ra, rb);
    }
    true
}

/// Minimum over every subset of undirected edges that is a spanning tree.
fn brute_force_mst(g: &Graph) -> u64 {
    let und: BTreeMap<(Elem, Elem), u64> = g.edges.iter().map(|&(_, e, w)| (e, w)).collect();
    let list: Vec<_> = und.into_iter().collect();
    let mut best = u64::MAX;
    for mask in 0u64..(1 << list.len()) {
        let pick: Vec<_> = (0..list.len()).filter(|k| mask >> k & 1 == 1).map(|k| list[k]).collect();
        let ends: Vec<_> = pick.iter().map(|&(e, _)| e).collect();
        if spanning_tree(&g.nodes, &ends) {
            best = best.min(pick.iter().map(|&(_, w)| w).sum());
        }
    }
    best
}

fn criterion_2() -> Outcome {
    let dir = corpus().join("kruskal");
    let mut checks = Vec::new();
    let mut parts = Vec::new();
    for name in ["square", "ties", "hexagon"] {
        let (m, s0) = load_instance(&dir.join("kruskal.asmr"), &dir.join(format!("{name}.asms"))).unwrap();
        let g = graph(&s0);
        let want = brute_force_mst(&g);
        let rep = run(&m, &s0, 100, RunMode::All, &limits()).unwrap();
        let tf = s0.signature().lookup("T").unwrap();
        let t = s0.universe().true_elem();
        let mut bad = Vec::new();
        for end in rep.terminal.keys() {
            let chosen: Vec<_> = g.edges.iter().filter(|&&(x, _, _)| end.get(tf, &[x]) == t).collect();
            let und: BTreeMap<(Elem, Elem), u64> = chosen.iter().map(|&&(_, e, w)| (e, w)).collect();
            // both directions of every tree edge are marked
            let symmetric = chosen.len() == 2 * und.len();
            let ends: Vec<_> = und.keys().copied().collect();
            let weight: u64 = und.values().sum();
            if !(symmetric && spanning_tree(&g.nodes, &ends) && weight == want) {
                bad.push(weight);
            }
        }
        let ok = !rep.terminal.is_empty() && rep.stuck.is_empty() && !rep.non_terminating && bad.is_empty();
        checks.push(Check::new(
            format!("2/{name}"),
            ok,
            format!(
                "{} terminal, {} stuck, oracle weight {want}, off-weight or non-tree ends {:?}",
                rep.terminal.len(),
                rep.stuck.len(),
                bad
            ),
        ));
        parts.push(format!("{name}: {} terminal states, MST weight {want}", rep.terminal.len()));
    }
    Outcome { checks, info: vec![], summary: parts.join("; ") }
}

// ---------------------------------------------------------------- 3

const SUITE: [SchemaId; 21] = [
    SchemaId::U1,
    SchemaId::U2,
    SchemaId::U3,
    SchemaId::U4,
    SchemaId::U5,
    SchemaId::U6,
    SchemaId::U7,
    SchemaId::M1,
    SchemaId::M4,
    SchemaId::M5,
    SchemaId::M6,
    SchemaId::M7,
    SchemaId::M8,
    SchemaId::A1,
    SchemaId::A2,
    SchemaId::P1,
    SchemaId::P2,
    SchemaId::P3,
    SchemaId::EQ1,
    SchemaId::EQ2,
    SchemaId::DY1,
];

fn criterion_3() -> Outcome {
    let cfg = ValidateConfig { trials: AXIOM_TRIALS, seed: SEED, shape: Shape::default(), ..ValidateConfig::default() };
    let lim = limits();
    let mut checks = Vec::new();
    let mut info = Vec::new();
    let mut total = 0;
    for id in SUITE {
        let r = validate_schema(id, Mutation::None, &cfg, &lim).unwrap();
        total += r.trials;
        let first = r.first.map(|c| format!("; first: {} under {}", c.instance, c.valuation)).unwrap_or_default();
        checks.push(Check::new(
            format!("3/{}", id.name()),
            r.trials >= 100 && r.counterexamples == 0,
            format!("{} counterexamples in {} trials, {} skipped{first}", r.counterexamples, r.trials, r.skipped),
        ));
    }
    let frame = ValidateConfig { static_frame_only: true, ..cfg };
    for id in [SchemaId::M7, SchemaId::M8] {
        let r = validate_schema(id, Mutation::None, &frame, &lim).unwrap();
        info.push(format!("{} with static φ only: {} counterexamples in {} trials", id.name(), r.counterexamples, r.trials));
    }
    for (name, id, mutation) in [
        ("a2-without-con", SchemaId::A2, Mutation::A2WithoutConsistency),
        ("m5-false-on-inconsistent", SchemaId::M5, Mutation::ModalFalseOnInconsistent),
    ] {
        let r = validate_schema(id, mutation, &cfg, &lim).unwrap();
        checks.push(Check::new(
            format!("3/control:{name}"),
            r.counterexamples >= 1,
            format!("mutant refuted {} times in {} trials", r.counterexamples, r.trials),
        ));
    }
    Outcome { checks, info, summary: format!("{} schemas, {total} instances", SUITE.len()) }
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let cfg = LemmaConfig { pairs: LEMMA_PAIRS, seed: SEED, ..LemmaConfig::default() };
    let lim = limits();
    let mut checks = Vec::new();
    for l in Lemma::ALL {
        let r = check_lemma(l, &cfg, &lim).unwrap();
        let first = r.first.map(|c| format!("; first: {} under {}", c.instance, c.valuation)).unwrap_or_default();
        checks.push(Check::new(
            format!("4/{}", l.name()),
            r.counterexamples == 0,
            format!("{} counterexamples in {} pairs{first}", r.counterexamples, r.pairs),
        ));
    }
    // hand-built witnesses that random rules of this size do not reach
    let dir = corpus().join("formulas");
    let file = load_formulas(&dir.join("counterexamples.asml")).unwrap();
    let s = load_state(&dir.join("flags.asms")).unwrap();
    for (i, f) in file.formulas.iter().enumerate() {
        let v = eval(f, &s, &Valuation::new(), &lim).unwrap();
        checks.push(Check::new(format!("4/witness:counterexamples.asml#{}", i + 1), v, format!("evaluates to {v} on flags.asms")));
    }
    Outcome { checks, info: vec![], summary: format!("{} properties, {LEMMA_PAIRS} pairs each", Lemma::ALL.len()) }
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let lim = limits();
    let (mut agree, mut evals) = (0, 0);
    let mut checks = Vec::new();
    let mut largest = 0;
    for i in 0..TRANSLATION_FORMULAS {
        let mut smp = Sampler::new(1000 + i, Shape::default());
        let sig = Arc::new(smp.signature());
        let phi = smp.formula(&sig, &Scope::default(), 3, false);
        let (lin, st) = match to_lin(&phi, &sig, lim.max_nodes) {
            Ok(x) => x,
            Err(e) => {
                checks.push(Check::new(format!("5/formula-{i}"), false, format!("translation failed: {e}")));
                continue;
            }
        };
        largest = largest.max(st.output_nodes);
        if !is_membership_fragment(&lin) || !is_flat(&lin) {
            checks.push(Check::new(format!("5/formula-{i}"), false, "output keeps upd, a modality or a nested atom"));
            continue;
        }
        for _ in 0..TRANSLATION_STATES {
            let univ = Arc::new(smp.universe());
            let s = smp.state(&sig, &univ);
            let val = smp.valuation_for(&phi, &s);
            let a = eval(&phi, &s, &val, &lim);
            let b = Evaluator::new(&s, &lim, EvalOptions::default()).eval(&lin, &s, &val);
            evals += 1;
            match (a, b) {
                (Ok(a), Ok(b)) if a == b => agree += 1,
                (a, b) => {
                    checks.push(Check::new(format!("5/formula-{i}"), false, format!("original {a:?}, translated {b:?}")));
                    break;
                }
            }
        }
    }
    checks.push(Check::new("5/agreement", agree == evals, format!("{agree} of {evals} evaluations agree")));
    Outcome {
        checks,
        info: vec![],
        summary: format!("{TRANSLATION_FORMULAS} formulas x {TRANSLATION_STATES} states, {agree} agree, largest output {largest} nodes"),
    }
}

// ---------------------------------------------------------------- 6

struct ProofLine {
    file_line: usize,
    step: usize,
    formula: String,
    just: String,
}

fn proof_lines(text: &str) -> Vec<ProofLine> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let Some((head, rest)) = line.split_once(". ") else { continue };
        let Ok(step) = head.trim().parse::<usize>() else { continue };
        let Some((formula, just)) = rest.split_once(" ; ") else { continue };
        out.push(ProofLine { file_line: k + 1, step, formula: formula.into(), just: just.into() });
    }
    out
}

fn next_name(names: &[&str], cur: &str) -> String {
    let i = names.iter().position(|n| *n == cur).unwrap_or(0);
    names[(i + 1) % names.len()].into()
}

/// Every single-edit mutation of one proof line: (description, new justification or formula).
fn mutations(lines: &[ProofLine], idx: usize) -> Vec<(String, String)> {
    let l = &lines[idx];
    let mut out = Vec::new();
    let render = |formula: &str, just: &str| format!("{}. {formula} ; {just}", l.step);
    let words: Vec<&str> = l.just.split_whitespace().collect();
    let schemas: Vec<&str> = SchemaId::ALL.iter().map(|s| s.name()).collect();
    let rules = ["M2", "M3", "UI", "EG", "UG", "EI"];
    match words.first().copied() {
        Some("axiom") => {
            let id = words[1];
            out.push(("change schema id".into(), render(&l.formula, &l.just.replacen(id, &next_name(&schemas, id), 1))));
        }
        Some("rule") => {
            let id = words[1].split('(').next().unwrap();
            out.push(("change rule id".into(), render(&l.formula, &l.just.replacen(id, &next_name(&rules, id), 1))));
            let open = l.just.find('(').unwrap();
            let close = l.just.find(')').unwrap();
            let prem: Vec<usize> = l.just[open + 1..close].split(',').map(|p| p.trim().parse().unwrap()).collect();
            let with = |ps: &[usize]| {
                let list = ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
                format!("{}{list}{}", &l.just[..open + 1], &l.just[close..])
            };
            let text_of = |k: usize| lines.iter().find(|x| x.step == k).map(|x| x.formula.clone());
            if prem.len() >= 2 && text_of(prem[0]) != text_of(prem[1]) {
                let mut sw = prem.clone();
                sw.swap(0, 1);
                out.push(("swap premises".into(), render(&l.formula, &with(&sw))));
            }
            for (pi, &p) in prem.iter().enumerate() {
                let alt = (1..l.step).rev().find(|&k| k != p && text_of(k) != text_of(p));
                if let Some(k) = alt {
                    let mut ch = prem.clone();
                    ch[pi] = k;
                    out.push((format!("premise {} -> {k}", p), render(&l.formula, &with(&ch))));
                }
            }
        }
        _ => {}
    }
    if l.just != "hyp" {
        out.push(("replace with hyp".into(), render(&l.formula, "hyp")));
    }
    if let Some(at) = l.just.find(" cert ") {
        out.push(("drop certificate".into(), render(&l.formula, &l.just[..at])));
    }
    out.push(("negate formula".into(), render(&format!("!({})", l.formula), &l.just)));
    out
}

/// Line reported for a parse error, from `... at LINE:COL ...`.
fn error_line(msg: &str) -> Option<usize> {
    let at = msg.find(" at ")?;
    let rest = &msg[at + 4..];
    rest.split(':').next()?.parse().ok()
}

fn criterion_6() -> Outcome {
    let dir = corpus().join("proofs");
    let scratch = std::env::temp_dir().join(format!("ndasm-acceptance-{}", std::process::id()));
    fs::create_dir_all(&scratch).unwrap();
    for e in fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        fs::copy(&p, scratch.join(p.file_name().unwrap())).unwrap();
    }
    let lim = limits();
    let mut checks = Vec::new();
    let (mut files, mut total, mut caught) = (0, 0, 0);
    let mut paths: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "asmd")) {
        files += 1;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let rep = prove_check(path, &lim).unwrap();
        checks.push(Check::new(format!("6/{name}"), rep.verdict == "ok", format!("verdict {}", rep.verdict)));
        let text = fs::read_to_string(path).unwrap();
        let lines = proof_lines(&text);
        for idx in 0..lines.len() {
            for (what, new_line) in mutations(&lines, idx) {
                total += 1;
                let target = lines[idx].file_line;
                let mutated: Vec<String> = text
                    .lines()
                    .enumerate()
                    .map(|(k, l)| if k + 1 == target { new_line.clone() } else { l.to_string() })
                    .collect();
                let mpath = scratch.join(format!("mutant_{name}"));
                fs::write(&mpath, mutated.join("\n") + "\n").unwrap();
                let at = match prove_check(&mpath, &lim) {
                    Ok(r) => r.lines.iter().find(|l| l.status == "rejected").map(|l| l.line),
                    Err(e) => error_line(&e.to_string()),
                };
                if at == Some(target) {
                    caught += 1;
                } else {
                    checks.push(Check::new(
                        format!("6/{name}:{}:{what}", target),
                        false,
                        format!("first diagnostic at {at:?}, mutated line {target}"),
                    ));
                }
            }
        }
    }
    let _ = fs::remove_dir_all(&scratch);
    checks.push(Check::new("6/mutations", caught == total, format!("{caught} of {total} rejected at the mutated line")));
    Outcome {
        checks,
        info: vec![],
        summary: format!("{files} derivations ok, {caught}/{total} mutations rejected at the edited line"),
    }
}

// ---------------------------------------------------------------- 7

fn ndasm(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ndasm")).args(args).current_dir(corpus()).output().unwrap();
    let mut bytes = out.stdout;
    bytes.extend_from_slice(b"\n--stderr--\n");
    bytes.extend(out.stderr);
    (bytes, out.status.code())
}

fn round_trips<T: serde::de::DeserializeOwned + Render>(json: &str) -> bool {
    serde_json::from_str::<T>(json).is_ok_and(|r| r.json() == json)
}

fn criterion_7() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["step", "words/words.asmr", "words/blank.asms"],
        vec!["run", "kruskal/kruskal.asmr", "kruskal/ties.asms"],
        vec!["run", "kruskal/kruskal.asmr", "kruskal/hexagon.asms", "--mode", "sample", "--seed", "7"],
        vec!["eval", "formulas/basics.asml", "formulas/tiny.asms", "--bindings", "$z = 0"],
        vec!["eval", "kruskal/properties.asml", "kruskal/square.asms"],
        vec!["translate", "formulas/basics.asml"],
        vec!["check-axioms", "--trials", "30", "--seed", "5"],
        vec!["check-axioms", "--schema", "A2", "--mutation", "a2-without-con", "--trials", "30"],
        vec!["prove-check", "proofs/box_intro.asmd"],
        vec!["prove-check", "proofs/extensionality.asmd"],
    ];
    let mut checks = Vec::new();
    let mut runs = 0;
    for cmd in &commands {
        for json in [false, true] {
            let mut args: Vec<&str> = Vec::new();
            if json {
                args.push("--json");
            }
            args.extend(cmd);
            let label = args.join(" ");
            let (a, ca) = ndasm(&args);
            let (b, cb) = ndasm(&args);
            runs += 2;
            checks.push(Check::new(format!("7/{label}"), a == b && ca == cb, format!("exit codes {ca:?} {cb:?}")));
            if json {
                let text = String::from_utf8(a).unwrap();
                let body = text.split("\n--stderr--\n").next().unwrap();
                let ok = match cmd[0] {
                    "step" => round_trips::<StepReport>(body),
                    "run" => round_trips::<RunSummary>(body),
                    "eval" => round_trips::<EvalReport>(body),
                    "translate" => round_trips::<TranslateReport>(body),
                    "check-axioms" => round_trips::<AxiomReport>(body),
                    _ => round_trips::<ProofReport>(body),
                };
                checks.push(Check::new(format!("7/json-round-trip:{label}"), ok, "deserialise and re-serialise"));
            }
        }
    }
    Outcome { checks, info: vec![], summary: format!("{} invocations, {runs} runs", commands.len() * 2) }
}

// ----------------------------------------------------------------

fn main() {
    type Criterion = (u8, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 7] = [
        (1, "example-1 reachability", criterion_1, Some(Duration::from_secs(10))),
        (2, "kruskal correctness", criterion_2, Some(Duration::from_secs(30))),
        (3, "axiom soundness", criterion_3, Some(Duration::from_secs(300))),
        (4, "derived properties", criterion_4, None),
        (5, "translation equivalence", criterion_5, Some(Duration::from_secs(300))),
        (6, "proof checker", criterion_6, None),
        (7, "determinism", criterion_7, None),
    ];
    let mut failing = BTreeSet::new();
    for (n, title, f, budget) in criteria {
        let t = Instant::now();
        let mut out = f();
        let took = t.elapsed();
        if let Some(b) = budget {
            out.checks.push(Check::new(format!("{n}/runtime"), took <= b, format!("{:.1} s, limit {} s", took.as_secs_f64(), b.as_secs())));
        }
        let ok = out.checks.iter().all(|c| c.ok);
        println!(
            "criterion {n} {:<24} {}  ({:.2} s)  {}",
            title,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.summary
        );
        for c in out.checks.iter().filter(|c| !c.ok) {
            println!("    failed {}: {}", c.id, c.note);
            failing.insert(c.id.clone());
        }
        for i in &out.info {
            println!("    info {i}");
        }
    }
    let known: BTreeSet<String> = KNOWN_FAILURES.iter().map(|s| s.to_string()).collect();
    let unexpected: Vec<_> = failing.difference(&known).collect();
    let vanished: Vec<_> = known.difference(&failing).collect();
    println!("known failures: {} of {} reproduced", known.len() - vanished.len(), known.len());
    if !unexpected.is_empty() || !vanished.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        println!("known failures that now pass: {vanished:?}");
        std::process::exit(1);
    }
}
