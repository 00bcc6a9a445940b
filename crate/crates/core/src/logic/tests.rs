use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::model::TaggedUpdate;
use crate::sample::{tuples, RuleShape, Sampler, Scope, Shape};
use crate::semantics::delta;
use crate::syntax::derived as d;
use crate::syntax::{parse_formula, parse_rule, parse_state, Fresh};

const SMALL: &str = "primary-carrier: true false a
secondary-carrier: 0 1
functions:
  function f/1 primary dynamic default a
    f(true) = false
  function c/0 bridge dynamic default 0
  function a/0 primary static default a
  function zero/0 secondary static default 0
  function one/0 secondary static default 1
";

/// Five triples in total, so nested enumeration stays cheap.
const TINY: &str = "primary-carrier: true false a
secondary-carrier: 0 1
functions:
  function g/0 primary dynamic default a
  function c/0 bridge dynamic default 1
";

/// Two primary atoms and four triples: 256 tagged sets.
const TAGGED: &str = "primary-carrier: true false
secondary-carrier: 0 1
functions:
  function g/0 primary dynamic default true
  function c/0 bridge dynamic default 1
";

fn st(src: &str) -> State {
    parse_state(src).unwrap()
}

fn f(s: &State, src: &str) -> Formula {
    parse_formula(src, s.signature()).unwrap()
}

fn limits() -> Limits {
    Limits::default()
}

fn holds(s: &State, src: &str) -> bool {
    eval(&f(s, src), s, &Valuation::new(), &limits()).unwrap()
}

fn all_updates(s: &State) -> Vec<Update> {
    let (sig, univ) = (s.signature(), s.universe());
    let mut out = Vec::new();
    for g in sig.dynamic_funcs() {
        let decl = sig.decl(g);
        for args in tuples(univ, decl.kind.arg_sort(), decl.arity) {
            for v in univ.carrier(decl.kind.value_sort()) {
                out.push(Update::new(g, args.clone(), v));
            }
        }
    }
    out
}

fn all_sets(s: &State) -> Vec<UpdateSet> {
    let ups = all_updates(s);
    (0..1usize << ups.len())
        .map(|mask| ups.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, u)| u.clone()).collect())
        .collect()
}

fn all_tagged(s: &State) -> Vec<TaggedUpdateSet> {
    let mut quads = Vec::new();
    for u in all_updates(s) {
        for tag in s.universe().carrier(Sort::Primary) {
            quads.push(TaggedUpdate { update: u.clone(), tag });
        }
    }
    (0..1usize << quads.len())
        .map(|mask| quads.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, q)| q.clone()).collect())
        .collect()
}

#[test]
fn first_order_examples() {
    let s = st(SMALL);
    assert!(holds(&s, "f(true) = false"));
    assert!(holds(&s, "forall x (f(x) = a | x = true)"));
    assert!(holds(&s, "exists $y ($y = c & c = zero)"));
    assert!(!holds(&s, "forall x (f(x) = a)"));
    assert!(holds(&s, "true"));
    assert!(!holds(&s, "false"));
}

#[test]
fn update_then_read_back() {
    let s = st(SMALL);
    assert!(holds(&s, "[f(a) := true] f(a) = true"));
    assert!(holds(&s, "<f(a) := true> f(a) = true"));
    assert!(holds(&s, "[f(a) := true] f(true) = false"));
    assert!(holds(&s, "forall X (upd(f(a) := true, X) -> [X] f(a) = true)"));
    // both choices are taken by the box, only one by the diamond
    assert!(!holds(&s, "[choose x with true do f(a) := x enddo] f(a) = a"));
    assert!(holds(&s, "<choose x with true do f(a) := x enddo> f(a) = a"));
}

#[test]
fn modality_on_inconsistent_sets() {
    let s = st(SMALL);
    let phi = f(&s, "[X] false");
    let mut val = Valuation::new();
    let t = s.universe().lookup("true").unwrap();
    let fl = s.universe().lookup("false").unwrap();
    let ff = s.signature().lookup("f").unwrap();
    val.bind_set(Var::set("X"), [Update::new(ff, vec![t], t), Update::new(ff, vec![t], fl)].into_iter().collect());
    assert!(eval(&phi, &s, &val, &limits()).unwrap());
    let strict = EvalOptions { modal_on_inconsistent: false };
    assert!(!eval_with(&phi, &s, &val, &limits(), strict).unwrap());
    // the inconsistent set wins over the search: [X] on a clash is decided
    // before X is complete
    assert!(holds(&s, "exists X (X(f, true, true) & X(f, true, false) & [X] false)"));
}

#[test]
fn wcon_distinguishes_clashing_par() {
    let s = st(SMALL);
    assert!(!holds(&s, "wcon(par f(a) := true f(a) := false endpar)"));
    assert!(holds(&s, "wcon(choose x with true do par f(a) := x f(a) := true endpar enddo)"));
    assert!(!holds(&s, "scon(choose x with true do par f(a) := x f(a) := true endpar enddo)"));
}

#[test]
fn unbound_variables_are_reported() {
    let s = st(SMALL);
    let err = eval(&f(&s, "x = x"), &s, &Valuation::new(), &limits()).unwrap_err();
    assert_eq!(err, Error::UnboundVariable("x".into()));
}

#[test]
fn search_cap_raises_resource_limit() {
    let s = st(SMALL);
    let tight = Limits { max_pred_enum: 3, ..Limits::default() };
    let phi = f(&s, "forall X (exists Y (X(f, a, a) <-> Y(f, a, a)))");
    assert!(matches!(eval(&phi, &s, &Valuation::new(), &tight), Err(Error::ResourceLimit(_))));
    assert!(eval(&phi, &s, &Valuation::new(), &limits()).unwrap());
}

#[test]
fn upd_atom_matches_delta_on_every_set() {
    let s = st(SMALL);
    let sets = all_sets(&s);
    for src in [
        "f(a) := true",
        "par f(a) := true c := one endpar",
        "choose x with x != a do f(x) := x enddo",
        "forall x with f(x) = a do f(x) := true enddo",
        "seq f(a) := true f(a) := false endseq",
        "if c = zero then c := one endif",
    ] {
        let r = parse_rule(src, s.signature()).unwrap();
        let fam = delta(&r, &s, &Valuation::new(), &limits()).unwrap();
        let atom = Formula::upd(r.clone(), Var::set("X"));
        for u in &sets {
            let mut val = Valuation::new();
            val.bind_set(Var::set("X"), u.clone());
            assert_eq!(eval(&atom, &s, &val, &limits()).unwrap(), fam.contains(u), "{src}");
        }
    }
}

#[test]
fn predicate_domain_round_trips() {
    let s = st(SMALL);
    let dom = PredDomain::new(s.signature(), s.universe());
    let ups = all_updates(&s);
    assert_eq!(dom.triples(), ups.len());
    assert_eq!(dom.quadruples(), ups.len() * 3);
    for u in ups {
        let i = dom.index(s.universe(), u.loc.func, &u.loc.args, u.value).unwrap();
        assert_eq!(dom.decode(s.universe(), i), u);
    }
}

fn oracle_forall(body: &Formula, x: &Var, s: &State, sets: &[UpdateSet], val: &Valuation) -> bool {
    sets.iter().all(|u| {
        let mut v = val.clone();
        v.bind_set(x.clone(), u.clone());
        eval(body, s, &v, &limits()).unwrap()
    })
}

fn sampled_body(seed: u64, s: &State, scope: Scope) -> (Formula, Valuation) {
    let mut smp = Sampler::new(seed, Shape::default());
    let mut scope = scope;
    scope.ind.push(Var::primary("p"));
    let body = smp.formula(s.signature(), &scope, 3, false);
    let mut val = Valuation::new();
    smp.bind(&mut val, Var::primary("p"), s);
    (body, val)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // The three-valued search against enumerating all 2^11 sets.
    #[test]
    fn set_quantifier_matches_enumeration(seed in any::<u64>()) {
        let s = st(SMALL);
        let x = Var::set("X");
        let (body, val) = sampled_body(seed, &s, Scope { blind_sets: vec![x.clone()], ..Scope::default() });
        let sets = all_sets(&s);
        let expect = oracle_forall(&body, &x, &s, &sets, &val);
        prop_assert_eq!(eval(&Formula::forall(x, body), &s, &val, &limits()).unwrap(), expect);
    }

    // Nested quantifiers exercise the memo table.
    #[test]
    fn nested_set_quantifiers_match_enumeration(seed in any::<u64>()) {
        let s = st(TINY);
        let (x, y) = (Var::set("X"), Var::set("Y"));
        let (body, val) = sampled_body(seed, &s, Scope { sets: vec![x.clone(), y.clone()], ..Scope::default() });
        let sets = all_sets(&s);
        let expect = sets.iter().all(|u| {
            let mut v = val.clone();
            v.bind_set(x.clone(), u.clone());
            !oracle_forall(&Formula::not(body.clone()), &y, &s, &sets, &v)
        });
        let phi = Formula::forall(x, Formula::exists(y, body));
        prop_assert_eq!(eval(&phi, &s, &val, &limits()).unwrap(), expect);
    }

    #[test]
    fn tagged_quantifier_matches_enumeration(seed in any::<u64>()) {
        let s = st(TAGGED);
        let t = Var::tagged("T");
        let mut smp = Sampler::new(seed, Shape::default());
        let scope = Scope { tagged: vec![t.clone()], ind: vec![Var::primary("p")], ..Scope::default() };
        let body = smp.formula(s.signature(), &scope, 3, false);
        let mut val = Valuation::new();
        smp.bind(&mut val, Var::primary("p"), &s);
        let expect = all_tagged(&s).into_iter().any(|u| {
            let mut v = val.clone();
            v.bind_tagged(t.clone(), u);
            eval(&body, &s, &v, &limits()).unwrap()
        });
        prop_assert_eq!(eval(&Formula::exists(t, body), &s, &val, &limits()).unwrap(), expect);
    }

    // Direct Δ-based predicates against their defining formulas.
    #[test]
    fn consistency_predicates_two_routes(seed in any::<u64>()) {
        let mut smp = Sampler::new(seed, Shape::default());
        let s = smp.world();
        let sig = s.signature().clone();
        let r1 = smp.rule(&sig, &Scope::default(), 2, RuleShape::default());
        let r2 = smp.rule(&sig, &Scope::default(), 2, RuleShape::default());
        let v = Valuation::new();
        let lim = limits();
        let mut fresh = Fresh::for_signature(&sig);
        fresh.avoid_rule(&r1);
        fresh.avoid_rule(&r2);
        prop_assert_eq!(eval(&d::wcon(&sig, &r1, &mut fresh), &s, &v, &lim).unwrap(), wcon(&r1, &s, &v, &lim).unwrap());
        prop_assert_eq!(eval(&d::scon(&sig, &r1, &mut fresh), &s, &v, &lim).unwrap(), scon(&r1, &s, &v, &lim).unwrap());
        prop_assert_eq!(
            eval(&d::joinable(&sig, &r1, &r2, &mut fresh), &s, &v, &lim).unwrap(),
            joinable(&r1, &r2, &s, &v, &lim).unwrap()
        );
        let u = smp.update_set(&s);
        let mut vx = Valuation::new();
        vx.bind_set(Var::set("U"), u.clone());
        prop_assert_eq!(
            eval(&d::con(&sig, &r1, &Var::set("U"), &mut fresh), &s, &vx, &lim).unwrap(),
            con(&r1, &u, &s, &v, &lim).unwrap()
        );
        prop_assert_eq!(
            eval(&d::con_uset(&sig, &Var::set("U"), &mut fresh), &s, &vx, &lim).unwrap(),
            con_uset(&u)
        );
    }

    // [r]φ read through Δ: φ holds after every consistent member.
    #[test]
    fn box_matches_successor_check(seed in any::<u64>()) {
        let mut smp = Sampler::new(seed, Shape::default());
        let s = smp.world();
        let sig = s.signature().clone();
        let r = smp.rule(&sig, &Scope::default(), 2, RuleShape::default());
        let phi = smp.guard(&sig, &Scope::default(), 2, false);
        let lim = limits();
        let v = Valuation::new();
        let fam = delta(&r, &s, &v, &lim).unwrap();
        let mut expect = true;
        for u in fam.iter().filter(|u| u.is_consistent()) {
            expect &= eval(&phi, &s.apply(u).unwrap(), &v, &lim).unwrap();
        }
        prop_assert_eq!(eval(&box_formula(&r, &phi, &sig), &s, &v, &lim).unwrap(), expect);
    }
}

#[test]
fn nodes_are_counted() {
    let s = st(SMALL);
    let lim = limits();
    let ev = Evaluator::new(&s, &lim, EvalOptions::default());
    assert!(ev.eval(&f(&s, "exists X (X(f, a, a))"), &s, &Valuation::new()).unwrap());
    assert!(ev.nodes() >= 2);
}
