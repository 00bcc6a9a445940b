use ndasm_core::logic::validate::{validate_schema, Mutation, ValidateConfig};
use ndasm_core::proof::{check, Derivation, instantiate_schema, Instantiation, LineStatus, MetaValue, SchemaId, Verdict};
use ndasm_core::syntax::{alpha_eq, parse_derivation, parse_formula, parse_state};
use ndasm_core::{Limits, State};

const SIG: &str = "signature:
  function f/1 primary dynamic
  function k/0 primary static
";

const STATE: &str = "primary-carrier: true false a
secondary-carrier: 0
functions:
  function f/1 primary dynamic default a
  function k/0 primary static default true
";

/// φ → [r]φ for φ := x = x and r := f(k) := x.
const BOX_INTRO: &str = "proof:
1. x = x ; axiom EQ1 [t := x]
2. [X] x = x ; rule M2(1) [X := X]
3. [X] x = x -> (upd(f(k) := x, X) -> [X] x = x) ; axiom P1 [phi := [X] x = x, psi := upd(f(k) := x, X)]
4. upd(f(k) := x, X) -> [X] x = x ; rule M3(2, 3)
5. forall X (upd(f(k) := x, X) -> [X] x = x) ; rule UG(4) cert states(\"blank.state\")
6. [f(k) := x] x = x -> (x = x -> [f(k) := x] x = x) ; axiom P1 [phi := [f(k) := x] x = x, psi := x = x]
7. x = x -> [f(k) := x] x = x ; rule M3(5, 6)
";

fn derivation(body: &str) -> Derivation {
    parse_derivation(&format!("{SIG}{body}")).unwrap()
}

fn verdict(body: &str) -> (Verdict, Vec<(usize, LineStatus)>) {
    let d = derivation(body);
    let state = parse_state(STATE).unwrap();
    let mut resolve = |name: &str| -> Result<Vec<State>, String> {
        if name == "blank.state" {
            Ok(vec![state.clone()])
        } else {
            Err(format!("no such file {name}"))
        }
    };
    let rep = check(&d, &[], &mut resolve, &Limits::default());
    (rep.verdict(), rep.lines.iter().map(|l| (l.label, l.status.clone())).collect())
}

#[test]
fn box_introduction_is_accepted() {
    let (v, lines) = verdict(BOX_INTRO);
    assert_eq!(v, Verdict::Ok, "{lines:?}");
    let (v, _) = verdict(&BOX_INTRO.replace("cert states(\"blank.state\")", "cert axiomatic"));
    assert_eq!(v, Verdict::OkModuloCertificates);
}

fn rejected_at(body: &str, label: usize) {
    let (v, lines) = verdict(body);
    assert_eq!(v, Verdict::Rejected, "{body}");
    let bad: Vec<usize> = lines.iter().filter(|(_, s)| matches!(s, LineStatus::Rejected(_))).map(|l| l.0).collect();
    assert!(bad.contains(&label), "{bad:?}");
}

#[test]
fn wrong_justification_id_is_rejected() {
    rejected_at(&BOX_INTRO.replace("3. [X] x = x -> (upd(f(k) := x, X) -> [X] x = x) ; axiom P1", "3. [X] x = x -> (upd(f(k) := x, X) -> [X] x = x) ; axiom P3"), 3);
    rejected_at(&BOX_INTRO.replace("rule M2(1) [X := X]", "rule M2(1) [X := Y]"), 2);
}

#[test]
fn swapped_premises_are_rejected() {
    rejected_at(&BOX_INTRO.replace("rule M3(2, 3)", "rule M3(3, 2)"), 4);
}

#[test]
fn wrong_premise_index_is_rejected() {
    rejected_at(&BOX_INTRO.replace("rule M3(5, 6)", "rule M3(4, 6)"), 7);
    rejected_at(&BOX_INTRO.replace("rule M3(5, 6)", "rule M3(5, 8)"), 7);
}

#[test]
fn unlisted_hypothesis_is_rejected() {
    rejected_at(&BOX_INTRO.replace("rule M3(2, 3)", "hyp"), 4);
}

#[test]
fn missing_certificate_is_rejected() {
    rejected_at(&BOX_INTRO.replace(" cert states(\"blank.state\")", ""), 5);
    rejected_at(&BOX_INTRO.replace("blank.state", "absent.state"), 5);
}

#[test]
fn failing_certificate_is_rejected() {
    // f(x) = x is false at x = true in the blank state
    let body = "proof:
1. f(x) = x ; hyp
2. forall x (f(x) = x) ; rule UG(1) cert states(\"blank.state\")
";
    let d = parse_derivation(&format!("{SIG}hypothesis: f(x) = x\n{body}")).unwrap();
    let state = parse_state(STATE).unwrap();
    let mut resolve = |_: &str| -> Result<Vec<State>, String> { Ok(vec![state.clone()]) };
    let rep = check(&d, &[], &mut resolve, &Limits::default());
    assert_eq!(rep.lines[0].status, LineStatus::Ok);
    assert!(matches!(rep.lines[1].status, LineStatus::Rejected(_)));
}

#[test]
fn dynamic_instance_of_universal_instantiation_needs_purity() {
    let body = "hypothesis: forall x ([X] f(x) = x)
proof:
1. forall x ([X] f(x) = x) ; hyp
2. [X] f(f(k)) = f(k) ; rule UI(1) [t := f(k)]
3. [X] f(k) = k ; rule UI(1) [t := k]
";
    let (_, lines) = verdict(body);
    assert!(matches!(lines[1].1, LineStatus::Rejected(_)));
    assert_eq!(lines[2].1, LineStatus::Ok);
}

#[test]
fn propositional_instances_have_the_printed_shape() {
    let d = derivation("proof:\n");
    let sig = &d.signature;
    let phi = parse_formula("f(k) = k", sig).unwrap();
    let psi = parse_formula("[X] k = k", sig).unwrap();
    let inst = Instantiation::default().with("phi", MetaValue::Formula(phi)).with("psi", MetaValue::Formula(psi));
    let p1 = instantiate_schema(SchemaId::P1, &inst, sig).unwrap();
    assert!(alpha_eq(&p1, &parse_formula("f(k) = k -> ([X] k = k -> f(k) = k)", sig).unwrap()));
    let p3 = instantiate_schema(SchemaId::P3, &inst, sig).unwrap();
    assert!(alpha_eq(&p3, &parse_formula("(!f(k) = k -> ![X] k = k) -> ([X] k = k -> f(k) = k)", sig).unwrap()));
    assert!(instantiate_schema(SchemaId::P2, &inst, sig).is_err());
}

#[test]
fn frame_axioms_reject_dynamic_terms() {
    let d = derivation("proof:\n");
    let sig = &d.signature;
    let f = sig.lookup("f").unwrap();
    let k = ndasm_core::syntax::parse_term("k", sig).unwrap();
    let fk = ndasm_core::syntax::parse_term("f(k)", sig).unwrap();
    let base = Instantiation::default()
        .with("X", MetaValue::Var(ndasm_core::syntax::Var::set("X")))
        .with("f", MetaValue::Func(f));
    let ok = base.clone().with("args", MetaValue::Terms(vec![k.clone()])).with("y", MetaValue::Term(k.clone()));
    assert!(instantiate_schema(SchemaId::A2, &ok, sig).is_ok());
    let bad = base.with("args", MetaValue::Terms(vec![fk])).with("y", MetaValue::Term(k));
    assert!(instantiate_schema(SchemaId::A2, &bad, sig).is_err());
}

fn cfg(seed: u64) -> ValidateConfig {
    ValidateConfig { trials: 60, seed, ..ValidateConfig::default() }
}

#[test]
fn sound_schemas_have_no_counterexamples() {
    let lim = Limits::default();
    for id in SchemaId::ALL {
        if matches!(id, SchemaId::M7 | SchemaId::M8) {
            continue;
        }
        let rep = validate_schema(id, Mutation::None, &cfg(11), &lim).unwrap();
        assert_eq!(rep.counterexamples, 0, "{:?}: {:?}", id, rep.first);
        assert!(rep.trials > 0);
    }
}

#[test]
fn frame_schemas_hold_for_static_formulas() {
    let lim = Limits::default();
    for id in [SchemaId::M7, SchemaId::M8] {
        let c = ValidateConfig { static_frame_only: true, ..cfg(5) };
        assert_eq!(validate_schema(id, Mutation::None, &c, &lim).unwrap().counterexamples, 0);
    }
}

#[test]
fn truth_on_inconsistent_sets_is_load_bearing() {
    let rep = validate_schema(SchemaId::M5, Mutation::ModalFalseOnInconsistent, &cfg(3), &Limits::default()).unwrap();
    assert!(rep.counterexamples > 0);
    assert!(rep.first.is_some());
}
