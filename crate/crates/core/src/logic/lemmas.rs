//! Randomised checks of derived properties of the logic: the rule
//! modalities, the modal operator over update sets, weak consistency of
//! each rule constructor, and the algebra of `par` and `seq`.
//!
//! Some properties are also listed in a literal variant that is known not to
//! hold (wrong bracketing, a missing side condition). They are kept so the
//! harness reports the defect instead of silently testing a fixed version.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::validate::{valuation_text, Counterexample};
use super::{EvalOptions, Evaluator};
use crate::error::{Error, Result};
use crate::model::{Func, Signature, State};
use crate::sample::{RuleShape, Sampler, Scope, Shape};
use crate::semantics::{delta, Limits, Valuation};
use crate::syntax::derived::{box_rule, con, joinable, wcon};
use crate::syntax::ops::{Replacement, Subst};
use crate::syntax::printer::{formula_text, state_text};
use crate::syntax::{Formula, Fresh, Rule, Term, Var, VarSort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lemma {
    /// `[r](φ→ψ) ∧ [r]φ → [r]ψ`
    BoxDistributes,
    /// `([r](φ→ψ) → [r]φ) → [r]ψ`, the bracketing as printed.
    BoxDistributesAsPrinted,
    /// `φ → [r]φ` for static φ.
    StaticFrame,
    /// `φ → [r]φ` for any φ.
    FrameAnyFormula,
    /// `¬wcon(r) → [r]φ`, r deterministic.
    InconsistentBox,
    /// `wcon(r) → ([r]φ ↔ ¬[r]¬φ)`, r deterministic.
    BoxDiamondDuality,
    /// `con(r,X) ∧ [X]f(x)=y → X(f,x,y) ∨ (∀z ¬X(f,x,z) ∧ f(x)=y)`
    ModalReadBack,
    /// `con(r,X) ∧ [X]φ → ¬[X]¬φ`
    ConsistentModalDuality,
    /// `[X]∃xφ → ∃x[X]φ`
    ModalExists,
    /// `[X]φ1 ∧ [X]φ2 → [X](φ1 ∧ φ2)`
    ModalConjunction,
    /// `x=t → (y=s ↔ [f(t):=s]f(x)=y)`
    UpdateHitsLocation,
    /// `x≠t → (y=f(x) ↔ [f(t):=s]f(x)=y)`
    UpdateMissesLocation,
    /// `wcon(f(t):=s)`
    UpdateConsistent,
    /// `wcon(if φ then r) ↔ ¬φ ∨ (φ ∧ wcon(r))`
    IfConsistency,
    /// The `forall` consistency equivalence with a deterministic body.
    ForallConsistencyDeterministic,
    /// The same with any body.
    ForallConsistency,
    /// `wcon(par r1 r2) ↔ wcon(r1) ∧ wcon(r2) ∧ joinable(r1,r2)`, deterministic.
    ParConsistencyDeterministic,
    /// The same for any rules.
    ParConsistency,
    /// `wcon(choose x with φ do r) ↔ ∃x(φ ∧ wcon(r))`, x primary.
    ChoosePrimaryConsistency,
    /// The same with x secondary.
    ChooseSecondaryConsistency,
    /// `wcon(seq r1 r2) ↔ ∃X(con(r1,X) ∧ [X]wcon(r2))`
    SeqConsistency,
    /// `[if φ then r]ψ ↔ (φ ∧ [r]ψ) ∨ (¬φ ∧ ψ)`
    IfBox,
    /// `[choose x with φ do r]ψ ↔ ∀x(φ → [r]ψ)`, x primary and not free in ψ.
    ChoosePrimaryBox,
    /// The same with x secondary.
    ChooseSecondaryBox,
    /// `par r1 r2 ≡ par r2 r1`
    ParCommutes,
    /// `par (par r1 r2) r3 ≡ par r1 (par r2 r3)`
    ParAssociates,
    /// `seq (seq r1 r2) r3 ≡ seq r1 (seq r2 r3)`
    SeqAssociates,
    /// `r1 ≡ r2 → ([r1]φ ↔ [r2]φ)`
    Extensionality,
}

impl Lemma {
    pub const ALL: [Lemma; 28] = [
        Lemma::BoxDistributes,
        Lemma::BoxDistributesAsPrinted,
        Lemma::StaticFrame,
        Lemma::FrameAnyFormula,
        Lemma::InconsistentBox,
        Lemma::BoxDiamondDuality,
        Lemma::ModalReadBack,
        Lemma::ConsistentModalDuality,
        Lemma::ModalExists,
        Lemma::ModalConjunction,
        Lemma::UpdateHitsLocation,
        Lemma::UpdateMissesLocation,
        Lemma::UpdateConsistent,
        Lemma::IfConsistency,
        Lemma::ForallConsistencyDeterministic,
        Lemma::ForallConsistency,
        Lemma::ParConsistencyDeterministic,
        Lemma::ParConsistency,
        Lemma::ChoosePrimaryConsistency,
        Lemma::ChooseSecondaryConsistency,
        Lemma::SeqConsistency,
        Lemma::IfBox,
        Lemma::ChoosePrimaryBox,
        Lemma::ChooseSecondaryBox,
        Lemma::ParCommutes,
        Lemma::ParAssociates,
        Lemma::SeqAssociates,
        Lemma::Extensionality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::BoxDistributes => "box-distributes-over-implication",
            Lemma::BoxDistributesAsPrinted => "box-distribution-as-printed",
            Lemma::StaticFrame => "static-formulas-survive-rules",
            Lemma::FrameAnyFormula => "any-formula-survives-rules",
            Lemma::InconsistentBox => "inconsistent-deterministic-rule-proves-all",
            Lemma::BoxDiamondDuality => "box-diamond-duality-defined-deterministic",
            Lemma::ModalReadBack => "modal-location-read-back",
            Lemma::ConsistentModalDuality => "consistent-modal-duality",
            Lemma::ModalExists => "modal-commutes-with-exists",
            Lemma::ModalConjunction => "modal-distributes-over-and",
            Lemma::UpdateHitsLocation => "update-hits-location",
            Lemma::UpdateMissesLocation => "update-misses-location",
            Lemma::UpdateConsistent => "update-rule-consistent",
            Lemma::IfConsistency => "wcon-if",
            Lemma::ForallConsistencyDeterministic => "wcon-forall-deterministic-body",
            Lemma::ForallConsistency => "wcon-forall-any-body",
            Lemma::ParConsistencyDeterministic => "wcon-par-deterministic",
            Lemma::ParConsistency => "wcon-par-any-rules",
            Lemma::ChoosePrimaryConsistency => "wcon-choose-primary",
            Lemma::ChooseSecondaryConsistency => "wcon-choose-secondary",
            Lemma::SeqConsistency => "wcon-seq",
            Lemma::IfBox => "box-if",
            Lemma::ChoosePrimaryBox => "box-choose-primary",
            Lemma::ChooseSecondaryBox => "box-choose-secondary",
            Lemma::ParCommutes => "par-commutes",
            Lemma::ParAssociates => "par-associates",
            Lemma::SeqAssociates => "seq-associates",
            Lemma::Extensionality => "rule-extensionality",
        }
    }

    pub fn by_name(name: &str) -> Option<Lemma> {
        Lemma::ALL.iter().copied().find(|l| l.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaConfig {
    /// Sampled (rule, state) pairs.
    pub pairs: usize,
    pub seed: u64,
    /// Valuations tried per pair.
    pub valuations: usize,
    pub shape: Shape,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { pairs: 100, seed: 0, valuations: 3, shape: Shape::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub pairs: usize,
    pub counterexamples: usize,
    pub skipped: usize,
    pub first: Option<Counterexample>,
}

/// One sampled instance. `equal_rules` are two rules whose families must
/// coincide; they are compared on Δ directly as well as through the formula.
struct Instance {
    formula: Formula,
    equal_rules: Option<(Rule, Rule)>,
    /// A set variable to bind to a member of Δ(r), when there is one.
    witness: Option<(Var, Rule)>,
    /// Argument and value variables to aim at a location of this function
    /// that the witness updates.
    aim: Option<(Func, Vec<Var>, Var)>,
}

impl Instance {
    fn plain(formula: Formula) -> Instance {
        Instance { formula, equal_rules: None, witness: None, aim: None }
    }
}

fn p() -> Var {
    Var::primary("p")
}

fn q() -> Var {
    Var::secondary("q")
}

fn base_scope() -> Scope {
    Scope { ind: vec![p(), q()], ..Scope::default() }
}

const DET: RuleShape = RuleShape { deterministic: true };
const ANY: RuleShape = RuleShape { deterministic: false };

fn fresh_for(sig: &Signature, smp_vars: &[&Formula], rules: &[&Rule]) -> Fresh {
    let mut fresh = Fresh::for_signature(sig);
    for f in smp_vars {
        fresh.avoid_formula(f);
    }
    for r in rules {
        fresh.avoid_rule(r);
    }
    fresh.avoid(&p());
    fresh.avoid(&q());
    fresh
}

fn instance(lemma: Lemma, smp: &mut Sampler, s: &State) -> Result<Option<Instance>> {
    let sig = s.signature();
    let scope = base_scope();
    let fo = |smp: &mut Sampler, scope: &Scope| smp.formula(sig, scope, 2, false);
    Ok(Some(match lemma {
        Lemma::BoxDistributes | Lemma::BoxDistributesAsPrinted => {
            let r = smp.rule(sig, &scope, 2, ANY);
            let (phi, psi) = (fo(smp, &scope), fo(smp, &scope));
            let mut fresh = fresh_for(sig, &[&phi, &psi], &[&r]);
            let imp = box_rule(&r, Formula::implies(phi.clone(), psi.clone()), &mut fresh);
            let bphi = box_rule(&r, phi, &mut fresh);
            let bpsi = box_rule(&r, psi, &mut fresh);
            let f = if lemma == Lemma::BoxDistributes {
                Formula::implies(Formula::and(imp, bphi), bpsi)
            } else {
                Formula::implies(Formula::implies(imp, bphi), bpsi)
            };
            Instance::plain(f)
        }
        Lemma::StaticFrame | Lemma::FrameAnyFormula => {
            let r = smp.rule(sig, &scope, 2, ANY);
            let phi = smp.formula(sig, &scope, 2, lemma == Lemma::StaticFrame);
            let mut fresh = fresh_for(sig, &[&phi], &[&r]);
            Instance::plain(Formula::implies(phi.clone(), box_rule(&r, phi, &mut fresh)))
        }
        Lemma::InconsistentBox => {
            let r = smp.rule(sig, &scope, 2, DET);
            let phi = fo(smp, &scope);
            let mut fresh = fresh_for(sig, &[&phi], &[&r]);
            let w = wcon(sig, &r, &mut fresh);
            Instance::plain(Formula::implies(Formula::not(w), box_rule(&r, phi, &mut fresh)))
        }
        Lemma::BoxDiamondDuality => {
            let r = smp.rule(sig, &scope, 2, DET);
            let phi = fo(smp, &scope);
            let mut fresh = fresh_for(sig, &[&phi], &[&r]);
            let w = wcon(sig, &r, &mut fresh);
            let b = box_rule(&r, phi.clone(), &mut fresh);
            let nbn = Formula::not(box_rule(&r, Formula::not(phi), &mut fresh));
            Instance::plain(Formula::implies(w, Formula::iff(b, nbn)))
        }
        Lemma::ModalReadBack => {
            let r = smp.rule(sig, &scope, 2, ANY);
            let dynamic: Vec<_> = sig.dynamic_funcs().collect();
            let f = dynamic[smp.below(dynamic.len())];
            let mut fresh = fresh_for(sig, &[], &[&r]);
            let x = fresh.var("X", VarSort::Set);
            let d = sig.decl(f).clone();
            let args: Vec<Var> = (0..d.arity).map(|_| fresh.individual(d.kind.arg_sort())).collect();
            let y = fresh.individual(d.kind.value_sort());
            let z = fresh.individual(d.kind.value_sort());
            let targs: Vec<Term> = args.iter().map(Term::var).collect();
            let read = Formula::eq(Term::App(f, targs.clone()), Term::var(&y));
            let member = |v: &Var| Formula::In1 { set: x.clone(), func: f, args: targs.clone(), value: Term::var(v) };
            let rhs = Formula::or(
                member(&y),
                Formula::and(Formula::forall(z.clone(), Formula::not(member(&z))), read.clone()),
            );
            let lhs = Formula::and(con(sig, &r, &x, &mut fresh), Formula::modal(x.clone(), read));
            Instance { formula: Formula::implies(lhs, rhs), equal_rules: None, witness: Some((x, r)), aim: Some((f, args, y)) }
        }
        Lemma::ConsistentModalDuality => {
            let r = smp.rule(sig, &scope, 2, ANY);
            let mut fresh = fresh_for(sig, &[], &[&r]);
            let x = fresh.var("X", VarSort::Set);
            let mut inner = scope.clone();
            inner.sets.push(x.clone());
            let phi = fo(smp, &inner);
            fresh.avoid_formula(&phi);
            let lhs = Formula::and(con(sig, &r, &x, &mut fresh), Formula::modal(x.clone(), phi.clone()));
            let rhs = Formula::not(Formula::modal(x.clone(), Formula::not(phi)));
            Instance { formula: Formula::implies(lhs, rhs), equal_rules: None, witness: Some((x, r)), aim: None }
        }
        Lemma::ModalExists => {
            let x = Var::set("Xm");
            let mut inner = scope.clone();
            inner.sets.push(x.clone());
            let v = smp.fresh_ind();
            let phi = fo(smp, &inner.with_ind(v.clone()));
            let lhs = Formula::modal(x.clone(), Formula::exists(v.clone(), phi.clone()));
            let rhs = Formula::exists(v, Formula::modal(x, phi));
            Instance::plain(Formula::implies(lhs, rhs))
        }
        Lemma::ModalConjunction => {
            let x = Var::set("Xm");
            let mut inner = scope.clone();
            inner.sets.push(x.clone());
            let (a, b) = (fo(smp, &inner), fo(smp, &inner));
            let lhs = Formula::and(Formula::modal(x.clone(), a.clone()), Formula::modal(x.clone(), b.clone()));
            Instance::plain(Formula::implies(lhs, Formula::modal(x, Formula::and(a, b))))
        }
        Lemma::UpdateHitsLocation | Lemma::UpdateMissesLocation => {
            let Rule::Update { func, args: targs, value } = smp.update_rule(sig, &scope) else {
                unreachable!("update_rule returns an update")
            };
            if lemma == Lemma::UpdateMissesLocation && targs.is_empty() {
                return Ok(None);
            }
            let r = Rule::update(func, targs.clone(), value.clone());
            let mut fresh = fresh_for(sig, &[], &[&r]);
            let d = sig.decl(func).clone();
            let xs: Vec<Var> = (0..d.arity).map(|_| fresh.individual(d.kind.arg_sort())).collect();
            let y = fresh.individual(d.kind.value_sort());
            let same = Formula::conj(xs.iter().zip(&targs).map(|(x, t)| Formula::eq(Term::var(x), t.clone())));
            let read = Formula::eq(Term::App(func, xs.iter().map(Term::var).collect()), Term::var(&y));
            let after = box_rule(&r, read, &mut fresh);
            let f = if lemma == Lemma::UpdateHitsLocation {
                Formula::implies(same, Formula::iff(Formula::eq(Term::var(&y), value), after))
            } else {
                let now = Formula::eq(Term::var(&y), Term::App(func, xs.iter().map(Term::var).collect()));
                Formula::implies(Formula::not(same), Formula::iff(now, after))
            };
            Instance::plain(f)
        }
        Lemma::UpdateConsistent => {
            let r = smp.update_rule(sig, &scope);
            let mut fresh = fresh_for(sig, &[], &[&r]);
            Instance::plain(wcon(sig, &r, &mut fresh))
        }
        Lemma::IfConsistency => {
            let g = smp.guard(sig, &scope, 1, false);
            let r = smp.rule(sig, &scope, 1, ANY);
            let whole = Rule::if_then(g.clone(), r.clone());
            let mut fresh = fresh_for(sig, &[&g], &[&r]);
            let lhs = wcon(sig, &whole, &mut fresh);
            let rhs = Formula::or(Formula::not(g.clone()), Formula::and(g, wcon(sig, &r, &mut fresh)));
            Instance::plain(Formula::iff(lhs, rhs))
        }
        Lemma::ForallConsistencyDeterministic | Lemma::ForallConsistency => {
            let shape = if lemma == Lemma::ForallConsistency { ANY } else { DET };
            let x = smp.fresh(VarSort::Primary);
            let inner = scope.with_ind(x.clone());
            let g = smp.guard(sig, &inner, 1, false);
            let r = smp.rule(sig, &inner, 2, shape);
            let whole = Rule::forall(x.clone(), g.clone(), r.clone());
            let mut fresh = fresh_for(sig, &[&g], &[&r]);
            let y = fresh.var("v", VarSort::Primary);
            let to_y = Replacement::Var(y.clone());
            let sub = Subst::new(&x, &to_y);
            let (gy, ry) = (sub.formula(&g)?, sub.rule(&r)?);
            let pairwise = Formula::forall(y, Formula::implies(gy, joinable(sig, &r, &ry, &mut fresh)));
            let rhs = Formula::forall(
                x,
                Formula::implies(g, Formula::and(wcon(sig, &r, &mut fresh), pairwise)),
            );
            Instance::plain(Formula::iff(wcon(sig, &whole, &mut fresh), rhs))
        }
        Lemma::ParConsistencyDeterministic | Lemma::ParConsistency => {
            let shape = if lemma == Lemma::ParConsistency { ANY } else { DET };
            let r1 = smp.rule(sig, &scope, 2, shape);
            let r2 = smp.rule(sig, &scope, 2, shape);
            let whole = Rule::par(r1.clone(), r2.clone());
            let mut fresh = fresh_for(sig, &[], &[&whole]);
            let rhs = Formula::conj([
                wcon(sig, &r1, &mut fresh),
                wcon(sig, &r2, &mut fresh),
                joinable(sig, &r1, &r2, &mut fresh),
            ]);
            Instance::plain(Formula::iff(wcon(sig, &whole, &mut fresh), rhs))
        }
        Lemma::ChoosePrimaryConsistency | Lemma::ChooseSecondaryConsistency => {
            let sort = if lemma == Lemma::ChoosePrimaryConsistency { VarSort::Primary } else { VarSort::Secondary };
            let x = smp.fresh(sort);
            let inner = scope.with_ind(x.clone());
            let g = smp.guard(sig, &inner, 1, false);
            let r = smp.rule(sig, &inner, 1, ANY);
            let whole = Rule::choose(x.clone(), g.clone(), r.clone());
            let mut fresh = fresh_for(sig, &[&g], &[&whole]);
            let rhs = Formula::exists(x, Formula::and(g, wcon(sig, &r, &mut fresh)));
            Instance::plain(Formula::iff(wcon(sig, &whole, &mut fresh), rhs))
        }
        Lemma::SeqConsistency => {
            let r1 = smp.rule(sig, &scope, 1, ANY);
            let r2 = smp.rule(sig, &scope, 1, ANY);
            let whole = Rule::seq(r1.clone(), r2.clone());
            let mut fresh = fresh_for(sig, &[], &[&whole]);
            let x = fresh.var("X", VarSort::Set);
            let rhs =
                Formula::exists(x.clone(), Formula::and(con(sig, &r1, &x, &mut fresh), Formula::modal(x, wcon(sig, &r2, &mut fresh))));
            Instance::plain(Formula::iff(wcon(sig, &whole, &mut fresh), rhs))
        }
        Lemma::IfBox => {
            let g = smp.guard(sig, &scope, 1, false);
            let r = smp.rule(sig, &scope, 1, ANY);
            let psi = fo(smp, &scope);
            let whole = Rule::if_then(g.clone(), r.clone());
            let mut fresh = fresh_for(sig, &[&g, &psi], &[&r]);
            let lhs = box_rule(&whole, psi.clone(), &mut fresh);
            let rhs = Formula::or(
                Formula::and(g.clone(), box_rule(&r, psi.clone(), &mut fresh)),
                Formula::and(Formula::not(g), psi),
            );
            Instance::plain(Formula::iff(lhs, rhs))
        }
        Lemma::ChoosePrimaryBox | Lemma::ChooseSecondaryBox => {
            let sort = if lemma == Lemma::ChoosePrimaryBox { VarSort::Primary } else { VarSort::Secondary };
            let x = smp.fresh(sort);
            let inner = scope.with_ind(x.clone());
            let g = smp.guard(sig, &inner, 1, false);
            let r = smp.rule(sig, &inner, 1, ANY);
            // ψ is drawn outside the scope of x, which is the side condition
            let psi = fo(smp, &scope);
            let whole = Rule::choose(x.clone(), g.clone(), r.clone());
            let mut fresh = fresh_for(sig, &[&g, &psi], &[&whole]);
            let lhs = box_rule(&whole, psi.clone(), &mut fresh);
            let rhs = Formula::forall(x, Formula::implies(g, box_rule(&r, psi, &mut fresh)));
            Instance::plain(Formula::iff(lhs, rhs))
        }
        Lemma::ParCommutes | Lemma::ParAssociates | Lemma::SeqAssociates => {
            let r1 = smp.rule(sig, &scope, 1, ANY);
            let r2 = smp.rule(sig, &scope, 1, ANY);
            let r3 = smp.rule(sig, &scope, 1, ANY);
            let (a, b) = match lemma {
                Lemma::ParCommutes => (Rule::par(r1.clone(), r2.clone()), Rule::par(r2, r1)),
                Lemma::ParAssociates => (
                    Rule::par(Rule::par(r1.clone(), r2.clone()), r3.clone()),
                    Rule::par(r1, Rule::par(r2, r3)),
                ),
                _ => (Rule::seq(Rule::seq(r1.clone(), r2.clone()), r3.clone()), Rule::seq(r1, Rule::seq(r2, r3))),
            };
            let mut fresh = fresh_for(sig, &[], &[&a]);
            let x = fresh.var("X", VarSort::Set);
            let f = Formula::forall(x.clone(), Formula::iff(Formula::upd(a.clone(), x.clone()), Formula::upd(b.clone(), x)));
            Instance { formula: f, equal_rules: Some((a, b)), witness: None, aim: None }
        }
        Lemma::Extensionality => {
            let r1 = smp.rule(sig, &scope, 2, ANY);
            // mostly an equivalent rewrite so the premise is exercised
            let r2 = match (&r1, smp.below(3)) {
                (Rule::Par(a, b), 0 | 1) => Rule::par((**b).clone(), (**a).clone()),
                (_, 0 | 1) => Rule::par(r1.clone(), r1.clone()),
                _ => smp.rule(sig, &scope, 2, ANY),
            };
            let phi = fo(smp, &scope);
            let mut fresh = fresh_for(sig, &[&phi], &[&r1, &r2]);
            let x = fresh.var("X", VarSort::Set);
            let equiv =
                Formula::forall(x.clone(), Formula::iff(Formula::upd(r1.clone(), x.clone()), Formula::upd(r2.clone(), x)));
            let same = Formula::iff(box_rule(&r1, phi.clone(), &mut fresh), box_rule(&r2, phi, &mut fresh));
            Instance::plain(Formula::implies(equiv, same))
        }
    }))
}

fn valuation(inst: &Instance, smp: &mut Sampler, s: &State, limits: &Limits) -> Result<Valuation> {
    let mut val = smp.valuation_for(&inst.formula, s);
    if let Some((x, r)) = &inst.witness {
        let fam = delta(r, s, &val, limits)?;
        let members: Vec<_> = fam.iter().cloned().collect();
        if !members.is_empty() && smp.coin(0.8) {
            let u = members[smp.below(members.len())].clone();
            if let Some((f, args, y)) = &inst.aim {
                let hits: Vec<_> = u.iter().filter(|h| h.loc.func == *f).cloned().collect();
                if !hits.is_empty() && smp.coin(0.7) {
                    let h = &hits[smp.below(hits.len())];
                    for (a, e) in args.iter().zip(&h.loc.args) {
                        val.bind(a.clone(), *e);
                    }
                    if smp.coin(0.5) {
                        val.bind(y.clone(), h.value);
                    }
                }
            }
            val.bind_set(x.clone(), u);
        }
    }
    Ok(val)
}

/// Does `inst` hold under `val`? Both routes must agree when the instance
/// carries a pair of rules.
fn holds(inst: &Instance, ev: &Evaluator, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    let by_formula = ev.eval(&inst.formula, s, val)?;
    if let Some((a, b)) = &inst.equal_rules {
        let by_delta = delta(a, s, val, limits)? == delta(b, s, val, limits)?;
        return Ok(by_formula && by_delta);
    }
    Ok(by_formula)
}

fn pair_seed(seed: u64, attempt: usize) -> u64 {
    seed ^ (attempt as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Checks `cfg.pairs` sampled instances of `lemma`.
pub fn check_lemma(lemma: Lemma, cfg: &LemmaConfig, limits: &Limits) -> Result<LemmaReport> {
    let mut report = LemmaReport { lemma, pairs: 0, counterexamples: 0, skipped: 0, first: None };
    let mut attempt = 0;
    while report.pairs < cfg.pairs {
        if attempt >= cfg.pairs * 4 {
            return Err(Error::ResourceLimit(alloc::format!(
                "{}: too many pairs hit resource limits ({} skipped)",
                lemma.name(),
                report.skipped
            )));
        }
        let seed = pair_seed(cfg.seed, attempt);
        attempt += 1;
        let mut smp = Sampler::new(seed, cfg.shape);
        let s = smp.world();
        let Some(inst) = instance(lemma, &mut smp, &s)? else {
            continue;
        };
        match refute(&inst, &mut smp, &s, cfg.valuations, limits) {
            Ok(None) => report.pairs += 1,
            Ok(Some(val)) => {
                report.pairs += 1;
                report.counterexamples += 1;
                if report.first.is_none() {
                    report.first = Some(Counterexample {
                        seed,
                        state: state_text(&s),
                        valuation: valuation_text(&val, &s),
                        instance: instance_text(&inst, &s),
                    });
                }
            }
            Err(Error::ResourceLimit(_)) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn refute(inst: &Instance, smp: &mut Sampler, s: &State, tries: usize, limits: &Limits) -> Result<Option<Valuation>> {
    let ev = Evaluator::new(s, limits, EvalOptions::default());
    for _ in 0..tries.max(1) {
        let val = valuation(inst, smp, s, limits)?;
        if !holds(inst, &ev, s, &val, limits)? {
            return Ok(Some(val));
        }
    }
    Ok(None)
}

fn instance_text(inst: &Instance, s: &State) -> String {
    formula_text(&inst.formula, s.signature())
}
