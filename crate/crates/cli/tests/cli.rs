use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ndasm::report::RunSummary;
use ndasm_core::syntax::{alpha_eq, parse_lformula};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

struct Out {
    stdout: String,
    stderr: String,
    code: i32,
}

fn ndasm(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_ndasm")).args(args).current_dir(corpus()).output().unwrap();
    Out {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

/// A scratch directory private to one test.
fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ndasm-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

const FLAG_STATE: &str = "primary-carrier: true false a
secondary-carrier: 0
functions:
  function f/0 primary dynamic default a
";

#[test]
fn empty_update_gives_one_successor() {
    let d = scratch("skip");
    fs::write(d.join("m.asmr"), "signature:\n  function f/0 primary dynamic\nrule:\n  if false = true then f := a endif\n")
        .unwrap();
    fs::write(d.join("s.asms"), FLAG_STATE).unwrap();
    let (m, s) = (d.join("m.asmr"), d.join("s.asms"));
    let out = ndasm(&["--json", "step", m.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    assert!(out.stderr.contains("`a`"), "{}", out.stderr);

    // atoms are not terms: name them through a static constant
    fs::write(
        d.join("m.asmr"),
        "signature:\n  function f/0 primary dynamic\n  function k/0 primary static\nrule:\n  if false = true then f := k endif\n",
    )
    .unwrap();
    fs::write(d.join("s.asms"), format!("{FLAG_STATE}  function k/0 primary static default a\n")).unwrap();
    let out = ndasm(&["--json", "step", m.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep: ndasm::report::StepReport = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(rep.update_sets.len(), 1);
    assert!(rep.update_sets[0].updates.is_empty());
    assert_eq!(rep.successors, 1);
}

#[test]
fn words_step_has_fourteen_successors() {
    let out = ndasm(&["step", "words/words.asmr", "words/blank.asms"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.ends_with("successors: 14\n"), "{}", out.stdout);
}

#[test]
fn family_cap_exits_with_three() {
    let out = ndasm(&["--max-family", "3", "step", "words/words.asmr", "words/blank.asms"]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.starts_with("error: "));
}

#[test]
fn parse_errors_exit_with_two_and_give_a_position() {
    let d = scratch("parse");
    fs::write(d.join("bad.asml"), "signature:\n  function f/0 primary dynamic\nformula:\n  f = = f\n").unwrap();
    let out = ndasm(&["translate", d.join("bad.asml").to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains(" at 4:"), "{}", out.stderr);
    let missing = ndasm(&["translate", "no/such/file.asml"]);
    assert_eq!(missing.code, 2);
}

#[test]
fn kruskal_properties_hold_on_every_graph() {
    for g in ["square", "ties", "hexagon"] {
        let state = format!("kruskal/{g}.asms");
        let out = ndasm(&["eval", "kruskal/properties.asml", &state]);
        assert_eq!(out.code, 0, "{g}: {}", out.stdout);
        // the single-location reading is false: each step marks both directions
        let lit = ndasm(&["eval", "kruskal/one_location.asml", &state]);
        assert_eq!(lit.code, 1, "{g}");
    }
}

#[test]
fn translating_a_pure_formula_only_renames() {
    let out = ndasm(&["translate", "formulas/basics.asml"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let input = parse_lformula(&fs::read_to_string(corpus().join("formulas/basics.asml")).unwrap()).unwrap();
    let output = parse_lformula(&out.stdout).unwrap();
    assert_eq!(input.formulas.len(), output.formulas.len());
    assert!(alpha_eq(&input.formulas[0], &output.formulas[0]));
    assert!(!alpha_eq(&input.formulas[1], &output.formulas[1]));
}

#[test]
fn sound_schema_has_no_counterexamples() {
    let out = ndasm(&["check-axioms", "--schema", "M4", "--trials", "50"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("counterexamples 0"), "{}", out.stdout);
    let bad = ndasm(&["check-axioms", "--schema", "M5", "--mutation", "m5-false-on-inconsistent", "--trials", "50"]);
    assert_eq!(bad.code, 1);
    let unknown = ndasm(&["check-axioms", "--schema", "Z9"]);
    assert_eq!(unknown.code, 2);
}

#[test]
fn sampled_runs_repeat_for_a_seed() {
    let args = ["run", "kruskal/kruskal.asmr", "kruskal/ties.asms", "--mode", "sample", "--seed", "7"];
    let a = ndasm(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, ndasm(&args).stdout);
}

#[test]
fn final_start_state_runs_zero_steps() {
    let d = scratch("final");
    let square = fs::read_to_string(corpus().join("kruskal/square.asms")).unwrap();
    // with no edges every state is final
    let edgeless: String =
        square.lines().filter(|l| !l.trim_start().starts_with("E(")).map(|l| format!("{l}\n")).collect();
    fs::write(d.join("edgeless.asms"), edgeless).unwrap();
    let machine = corpus().join("kruskal/kruskal.asmr");
    let out = ndasm(&["--json", "run", machine.to_str().unwrap(), d.join("edgeless.asms").to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep: RunSummary = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(rep.explored, 1);
    assert_eq!(rep.terminal.len(), 1);
    assert_eq!(rep.terminal[0].steps, 0);
    assert!(rep.terminal[0].changes.is_empty());
}

#[test]
fn deferred_certificates_are_reported_but_accepted() {
    let d = scratch("cert");
    let src = fs::read_to_string(corpus().join("proofs/extensionality.asmd")).unwrap();
    fs::write(d.join("ext.asmd"), src.replace("cert states(\"blank.asms\")", "cert axiomatic")).unwrap();
    let out = ndasm(&["prove-check", d.join("ext.asmd").to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.ends_with("verdict: ok-modulo-certificates\n"), "{}", out.stdout);
}

#[test]
fn rejected_derivation_exits_with_one() {
    let d = scratch("reject");
    for f in ["box_intro.asmd", "blank.asms"] {
        fs::copy(corpus().join("proofs").join(f), d.join(f)).unwrap();
    }
    let path = d.join("box_intro.asmd");
    let src = fs::read_to_string(&path).unwrap();
    fs::write(&path, src.replace("rule M3(2, 3)", "rule M3(3, 2)")).unwrap();
    let out = ndasm(&["prove-check", path.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("step 4: rejected"), "{}", out.stdout);
}

#[test]
fn false_formulas_exit_with_one() {
    let out = ndasm(&["eval", "formulas/counterexamples.asml", "formulas/flags.asms"]);
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout.lines().filter(|l| l.contains(". false")).count(), 2);
}
