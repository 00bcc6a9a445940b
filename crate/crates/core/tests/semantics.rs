use std::collections::BTreeSet;

use ndasm_core::semantics::{eval_guard, eval_term};
use ndasm_core::sample::{RuleShape, Sampler, Scope, Shape};
use ndasm_core::syntax::{parse_machine, parse_rule, parse_state, Rule};
use ndasm_core::{delta, run, successors, Error, Limits, RunMode, State, Update, UpdateSet, Valuation};
use proptest::prelude::*;

const STATE: &str = "primary-carrier: true false a
secondary-carrier: 0 1 2
functions:
  function f/1 primary dynamic default a
  function c/0 bridge dynamic default 0
  function one/0 secondary static default 1
  function two/0 secondary static default 2
  function a/0 primary static default a
";

fn st() -> State {
    parse_state(STATE).unwrap()
}

type Sets = BTreeSet<BTreeSet<Update>>;

/// Δ straight from its defining equations, over plain std sets.
fn reference(r: &Rule, s: &State, val: &Valuation) -> Sets {
    let one = |u: BTreeSet<Update>| -> Sets { [u].into_iter().collect() };
    let cross = |a: &Sets, b: &Sets| -> Sets {
        a.iter().flat_map(|x| b.iter().map(move |y| x.union(y).cloned().collect())).collect()
    };
    match r {
        Rule::Update { func, args, value } => {
            let a = args.iter().map(|t| eval_term(t, s, val).unwrap()).collect();
            one([Update::new(*func, a, eval_term(value, s, val).unwrap())].into_iter().collect())
        }
        Rule::If { guard, body } => {
            if eval_guard(guard, s, val).unwrap() {
                reference(body, s, val)
            } else {
                one(BTreeSet::new())
            }
        }
        Rule::Forall { var, guard, body } => {
            let mut acc = one(BTreeSet::new());
            for e in s.universe().carrier(var.sort.individual().unwrap()) {
                let v = val.with(var.clone(), e);
                if eval_guard(guard, s, &v).unwrap() {
                    acc = cross(&acc, &reference(body, s, &v));
                }
            }
            acc
        }
        Rule::Choose { var, guard, body } => {
            let mut acc = Sets::new();
            for e in s.universe().carrier(var.sort.individual().unwrap()) {
                let v = val.with(var.clone(), e);
                if eval_guard(guard, s, &v).unwrap() {
                    acc.extend(reference(body, s, &v));
                }
            }
            acc
        }
        Rule::Par(a, b) => cross(&reference(a, s, val), &reference(b, s, val)),
        Rule::Seq(a, b) => {
            let mut out = Sets::new();
            for d1 in reference(a, s, val) {
                let set: UpdateSet = d1.iter().cloned().collect();
                if !set.is_consistent() {
                    out.insert(d1);
                    continue;
                }
                let s1 = s.apply(&set).unwrap();
                for d2 in reference(b, &s1, val) {
                    let overridden: BTreeSet<_> = d2.iter().map(|u| &u.loc).collect();
                    let mut m: BTreeSet<Update> = d1.iter().filter(|u| !overridden.contains(&u.loc)).cloned().collect();
                    m.extend(d2);
                    out.insert(m);
                }
            }
            out
        }
    }
}

fn as_sets(r: &Rule, s: &State) -> Sets {
    delta(r, s, &Valuation::new(), &Limits::default())
        .unwrap()
        .iter()
        .map(|u| u.iter().cloned().collect())
        .collect()
}

fn family(s: &State, src: &str) -> Sets {
    as_sets(&parse_rule(src, s.signature()).unwrap(), s)
}

fn up(s: &State, f: &str, args: &[&str], v: &str) -> Update {
    let u = s.universe();
    Update::new(
        s.signature().lookup(f).unwrap(),
        args.iter().map(|a| u.lookup(a).unwrap()).collect(),
        u.lookup(v).unwrap(),
    )
}

#[test]
fn update_gives_one_singleton() {
    let s = st();
    let expect: Sets = [[up(&s, "f", &["true"], "false")].into_iter().collect()].into_iter().collect();
    assert_eq!(family(&s, "f(true) := false"), expect);
}

#[test]
fn false_guard_gives_the_empty_update_set() {
    let s = st();
    let expect: Sets = [BTreeSet::new()].into_iter().collect();
    assert_eq!(family(&s, "if c = one then c := two endif"), expect);
}

#[test]
fn choose_without_witness_is_empty() {
    let s = st();
    assert!(family(&s, "choose x with x != x do f(x) := x enddo").is_empty());
    assert!(successors(&parse_rule("choose x with x != x do f(x) := x enddo", s.signature()).unwrap(), &s, &Limits::default())
        .unwrap()
        .is_empty());
}

#[test]
fn choose_gives_one_set_per_witness() {
    let s = st();
    let fam = family(&s, "choose $y with true do c := $y enddo");
    assert_eq!(fam.len(), 3);
}

#[test]
fn forall_over_choose_multiplies() {
    let s = st();
    // three positions, two choices each
    let fam = family(&s, "forall x with true do choose z with z != a do f(x) := z enddo enddo");
    assert_eq!(fam.len(), 8);
    assert!(fam.iter().all(|u| u.len() == 3));
}

#[test]
fn clashing_par_has_no_successor() {
    let s = st();
    let r = parse_rule("par c := one c := two endpar", s.signature()).unwrap();
    assert_eq!(as_sets(&r, &s).len(), 1);
    assert!(successors(&r, &s, &Limits::default()).unwrap().is_empty());
}

#[test]
fn seq_keeps_an_inconsistent_first_stage() {
    let s = st();
    let fam = family(&s, "seq par c := one c := two endpar f(a) := true endseq");
    let expect: Sets = [[up(&s, "c", &[], "1"), up(&s, "c", &[], "2")].into_iter().collect()].into_iter().collect();
    assert_eq!(fam, expect);
}

#[test]
fn seq_reads_the_intermediate_state() {
    let s = st();
    let fam = family(&s, "seq c := one if c = one then f(a) := true endif endseq");
    let expect: Sets = [[up(&s, "c", &[], "1"), up(&s, "f", &["a"], "true")].into_iter().collect()].into_iter().collect();
    assert_eq!(fam, expect);
    let later = family(&s, "seq c := one c := two endseq");
    let expect: Sets = [[up(&s, "c", &[], "2")].into_iter().collect()].into_iter().collect();
    assert_eq!(later, expect);
}

#[test]
fn family_cap_is_enforced() {
    let s = st();
    let r = parse_rule("forall x with true do choose z with true do f(x) := z enddo enddo", s.signature()).unwrap();
    let tight = Limits { max_family: 10, ..Limits::default() };
    assert!(matches!(delta(&r, &s, &Valuation::new(), &tight), Err(Error::ResourceLimit(_))));
    let tight = Limits { max_set: 2, ..Limits::default() };
    let r = parse_rule("forall x with true do f(x) := x enddo", s.signature()).unwrap();
    assert!(matches!(delta(&r, &s, &Valuation::new(), &tight), Err(Error::ResourceLimit(_))));
}

const COUNTER: &str = "signature:
  function n/0 secondary dynamic
  function one/0 secondary static
  function two/0 secondary static
rule:
  choose $y with $y != n do n := $y enddo
final: n = two
";

const COUNTER_STATE: &str = "primary-carrier: true false
secondary-carrier: 0 1 2
functions:
  function n/0 secondary dynamic default 0
  function one/0 secondary static default 1
  function two/0 secondary static default 2
";

#[test]
fn runs_stop_at_the_first_final_state() {
    let m = parse_machine(COUNTER).unwrap();
    let s0 = parse_state(COUNTER_STATE).unwrap();
    let rep = run(&m, &s0, 10, RunMode::All, &Limits::default()).unwrap();
    assert_eq!(rep.terminal.len(), 1);
    let (_, path) = rep.terminal.iter().next().unwrap();
    assert_eq!(path.len(), 2);
    assert!(!rep.non_terminating);
    assert!(rep.stuck.is_empty());
    let rep = run(&m, &s0, 10, RunMode::Sample(7), &Limits::default()).unwrap();
    assert_eq!(rep.terminal.len(), 1);
    let again = run(&m, &s0, 10, RunMode::Sample(7), &Limits::default()).unwrap();
    assert_eq!(rep, again);
    let cut = run(&m, &s0, 0, RunMode::All, &Limits::default()).unwrap();
    assert!(cut.non_terminating);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn delta_matches_reference(seed in any::<u64>()) {
        let mut smp = Sampler::new(seed, Shape::default());
        let s = smp.world();
        let sig = s.signature().clone();
        let r = smp.rule(&sig, &Scope::default(), 3, RuleShape::default());
        prop_assert_eq!(as_sets(&r, &s), reference(&r, &s, &Valuation::new()));
    }

    // Each successor is S + Δ for a consistent member, and nothing else.
    #[test]
    fn successors_are_consistent_applications(seed in any::<u64>()) {
        let mut smp = Sampler::new(seed, Shape::default());
        let s = smp.world();
        let sig = s.signature().clone();
        let r = smp.rule(&sig, &Scope::default(), 3, RuleShape::default());
        let lim = Limits::default();
        let fam = delta(&r, &s, &Valuation::new(), &lim).unwrap();
        let expect: BTreeSet<State> = fam.iter().filter(|u| u.is_consistent()).map(|u| s.apply(u).unwrap()).collect();
        prop_assert_eq!(successors(&r, &s, &lim).unwrap(), expect);
    }

    #[test]
    fn deterministic_rules_have_one_update_set(seed in any::<u64>()) {
        let mut smp = Sampler::new(seed, Shape::default());
        let s = smp.world();
        let sig = s.signature().clone();
        let r = smp.rule(&sig, &Scope::default(), 3, RuleShape { deterministic: true });
        prop_assert!(r.is_deterministic());
        prop_assert_eq!(delta(&r, &s, &Valuation::new(), &Limits::default()).unwrap().len(), 1);
    }
}
