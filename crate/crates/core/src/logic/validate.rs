//! Randomised soundness checks for the axiom schemas.
//!
//! Each trial draws a fresh world, instantiates the schema with sampled
//! rules, formulas and terms, and evaluates the instance under several
//! random valuations of its free variables. Set variables are often bound to
//! a member of Δ(r) so that the `upd` side of an instance is exercised.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{eval_with, EvalOptions};
use crate::error::{Error, Result};
use crate::model::{Func, Signature, Sort, State, Update};
use crate::proof::{instantiate_schema, Instantiation, MetaValue, SchemaId};
use crate::sample::{RuleShape, Sampler, Scope, Shape};
use crate::semantics::{delta, eval_term, Limits, Valuation};
use crate::syntax::printer::{formula_text, state_text, update_set_text};
use crate::syntax::ops::var_text;
use crate::syntax::{Formula, FreeVars, Rule, Term, Var, VarSort};

/// Deliberately broken variants used as controls: a harness that cannot
/// refute these is not testing anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// A2 with its `conUSet(X)` premise dropped.
    A2WithoutConsistency,
    /// M5 evaluated with `[X]φ` false on inconsistent X.
    ModalFalseOnInconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Seed of the sampler that produced the failing trial.
    pub seed: u64,
    pub state: String,
    pub valuation: String,
    pub instance: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaReport {
    pub schema: SchemaId,
    pub mutation: Mutation,
    pub seed: u64,
    /// Completed trials.
    pub trials: usize,
    /// Trials in which some valuation made the instance false.
    pub counterexamples: usize,
    /// Trials abandoned because evaluation hit a resource limit.
    pub skipped: usize,
    pub first: Option<Counterexample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateConfig {
    pub trials: usize,
    pub seed: u64,
    pub valuations: usize,
    pub shape: Shape,
    /// Restrict φ in M7/M8 to static formulas, leaving out pure ones.
    pub static_frame_only: bool,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { trials: 100, seed: 0, valuations: 4, shape: Shape::default(), static_frame_only: false }
    }
}

fn trial_seed(seed: u64, attempt: usize) -> u64 {
    seed ^ (attempt as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Checks `cfg.trials` random instances of `schema`.
pub fn validate_schema(schema: SchemaId, mutation: Mutation, cfg: &ValidateConfig, limits: &Limits) -> Result<SchemaReport> {
    let mut report =
        SchemaReport { schema, mutation, seed: cfg.seed, trials: 0, counterexamples: 0, skipped: 0, first: None };
    let opts = EvalOptions { modal_on_inconsistent: mutation != Mutation::ModalFalseOnInconsistent };
    let mut attempt = 0;
    while report.trials < cfg.trials {
        if attempt >= cfg.trials * 4 {
            return Err(Error::ResourceLimit(format!(
                "{}: too many trials hit resource limits ({} skipped)",
                schema.name(),
                report.skipped
            )));
        }
        let seed = trial_seed(cfg.seed, attempt);
        attempt += 1;
        let mut smp = Sampler::new(seed, cfg.shape);
        let s = smp.world();
        let Some(case) = sample_case(schema, mutation, &mut smp, &s, cfg)? else {
            continue;
        };
        match refute(&case, &mut smp, &s, cfg.valuations, limits, opts) {
            Ok(None) => report.trials += 1,
            Ok(Some(val)) => {
                report.trials += 1;
                report.counterexamples += 1;
                if report.first.is_none() {
                    let sig = s.signature();
                    report.first = Some(Counterexample {
                        seed,
                        state: state_text(&s),
                        valuation: valuation_text(&val, &s),
                        instance: formula_text(&case.instance, sig),
                    });
                }
            }
            Err(Error::ResourceLimit(_)) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// An instance plus hints for binding its free set variables.
struct Case {
    instance: Formula,
    /// Set variables that should often hold a member of Δ(rule).
    from_delta: Vec<(Var, Rule)>,
    /// A location whose update should often be planted in a set variable.
    planted: Option<(Var, Func, Vec<Term>, Term)>,
}

fn plain(instance: Formula) -> Case {
    Case { instance, from_delta: Vec::new(), planted: None }
}

/// Individual variables left free in sampled parts, so valuations matter.
fn base_scope(smp: &mut Sampler) -> Scope {
    let mut scope = Scope::default();
    scope.ind.push(smp.fresh(VarSort::Primary));
    if smp.coin(0.5) {
        scope.ind.push(smp.fresh(VarSort::Secondary));
    }
    scope
}

fn sample_case(
    schema: SchemaId,
    mutation: Mutation,
    smp: &mut Sampler,
    s: &State,
    cfg: &ValidateConfig,
) -> Result<Option<Case>> {
    let sig: &Signature = s.signature();
    let x = Var::set("X");
    let mut scope = base_scope(smp);
    scope.sets.push(x.clone());
    let inst = Instantiation::default();
    let any = RuleShape::default();
    let case = match schema {
        SchemaId::U1 | SchemaId::U2 | SchemaId::U3 | SchemaId::U4 | SchemaId::U5 | SchemaId::U6 | SchemaId::U7 => {
            let r = match schema {
                SchemaId::U1 => smp.update_rule(sig, &scope),
                SchemaId::U2 => smp.rule_form(sig, &scope, 2, any, 0),
                SchemaId::U3 => smp.rule_form(sig, &scope, 2, any, 1),
                SchemaId::U4 => smp.rule_form(sig, &scope, 2, any, 2),
                SchemaId::U7 => smp.rule_form(sig, &scope, 2, any, 3),
                _ => {
                    let sort = if schema == SchemaId::U5 { VarSort::Primary } else { VarSort::Secondary };
                    let v = smp.fresh(sort);
                    let inner = scope.with_ind(v.clone());
                    let g = smp.guard(sig, &inner, 1, false);
                    Rule::choose(v, g, smp.rule(sig, &inner, 1, any))
                }
            };
            let inst = inst.with("r", MetaValue::Rule(r.clone())).with("X", MetaValue::Var(x.clone()));
            Case { instance: instantiate_schema(schema, &inst, sig)?, from_delta: alloc::vec![(x, r)], planted: None }
        }
        SchemaId::M1 | SchemaId::M4 | SchemaId::M5 => {
            let phi = smp.formula(sig, &scope, 2, false);
            let mut inst = inst.with("X", MetaValue::Var(x)).with("phi", MetaValue::Formula(phi));
            if schema == SchemaId::M1 {
                inst = inst.with("psi", MetaValue::Formula(smp.formula(sig, &scope, 2, false)));
            }
            plain(instantiate_schema(schema, &inst, sig)?)
        }
        SchemaId::M6 => {
            let v = match smp.below(3) {
                0 => smp.fresh(VarSort::Primary),
                1 => smp.fresh(VarSort::Secondary),
                _ => smp.fresh(VarSort::Set),
            };
            let mut inner = scope.clone();
            if v.sort == VarSort::Set {
                inner.blind_sets.push(v.clone());
            } else {
                inner.ind.push(v.clone());
            }
            let phi = smp.formula(sig, &inner, 2, false);
            let inst = inst
                .with("x", MetaValue::Var(v))
                .with("X", MetaValue::Var(x))
                .with("phi", MetaValue::Formula(phi));
            plain(instantiate_schema(schema, &inst, sig)?)
        }
        SchemaId::M7 | SchemaId::M8 => {
            let r = smp.rule(sig, &scope, 2, any);
            let phi = if cfg.static_frame_only || smp.coin(0.5) {
                smp.formula(sig, &scope, 2, true)
            } else {
                smp.guard(sig, &scope, 2, false)
            };
            let inst = inst
                .with("r", MetaValue::Rule(r.clone()))
                .with("X", MetaValue::Var(x.clone()))
                .with("phi", MetaValue::Formula(phi));
            Case { instance: instantiate_schema(schema, &inst, sig)?, from_delta: alloc::vec![(x, r)], planted: None }
        }
        SchemaId::A1 | SchemaId::A2 => {
            let dynamic: Vec<Func> = sig.dynamic_funcs().collect();
            let f = dynamic[smp.below(dynamic.len())];
            let d = sig.decl(f).clone();
            let args: Vec<Term> = (0..d.arity).map(|_| smp.term(sig, d.kind.arg_sort(), &scope, 1, true)).collect();
            let y = smp.term(sig, d.kind.value_sort(), &scope, 1, true);
            let instance = if mutation == Mutation::A2WithoutConsistency {
                Formula::implies(
                    Formula::In1 { set: x.clone(), func: f, args: args.clone(), value: y.clone() },
                    Formula::modal(x.clone(), Formula::eq(Term::App(f, args.clone()), y.clone())),
                )
            } else {
                let inst = inst
                    .with("X", MetaValue::Var(x.clone()))
                    .with("f", MetaValue::Func(f))
                    .with("args", MetaValue::Terms(args.clone()))
                    .with("y", MetaValue::Term(y.clone()));
                instantiate_schema(schema, &inst, sig)?
            };
            Case { instance, from_delta: Vec::new(), planted: Some((x, f, args, y)) }
        }
        SchemaId::P1 | SchemaId::P2 | SchemaId::P3 => {
            let mut inst = inst
                .with("phi", MetaValue::Formula(smp.formula(sig, &scope, 2, false)))
                .with("psi", MetaValue::Formula(smp.formula(sig, &scope, 2, false)));
            if schema == SchemaId::P2 {
                inst = inst.with("chi", MetaValue::Formula(smp.formula(sig, &scope, 2, false)));
            }
            plain(instantiate_schema(schema, &inst, sig)?)
        }
        SchemaId::EQ1 => {
            let sort = if smp.coin(0.5) { Sort::Primary } else { Sort::Secondary };
            let t = smp.term(sig, sort, &scope, 2, true);
            plain(instantiate_schema(schema, &inst.with("t", MetaValue::Term(t)), sig)?)
        }
        SchemaId::EQ2 => {
            let funcs: Vec<Func> = sig.funcs().filter(|&f| sig.decl(f).arity > 0).collect();
            if funcs.is_empty() {
                return Ok(None);
            }
            let f = funcs[smp.below(funcs.len())];
            let d = sig.decl(f).clone();
            let lhs: Vec<Term> = (0..d.arity).map(|_| smp.term(sig, d.kind.arg_sort(), &scope, 1, true)).collect();
            let rhs: Vec<Term> = (0..d.arity).map(|_| smp.term(sig, d.kind.arg_sort(), &scope, 1, true)).collect();
            let inst = inst
                .with("f", MetaValue::Func(f))
                .with("lhs", MetaValue::Terms(lhs))
                .with("rhs", MetaValue::Terms(rhs));
            plain(instantiate_schema(schema, &inst, sig)?)
        }
        SchemaId::DY1 | SchemaId::E => {
            scope.sets.clear();
            let r1 = smp.rule(sig, &scope, 2, any);
            let r2 = if schema == SchemaId::E && smp.coin(0.5) { r1.clone() } else { smp.rule(sig, &scope, 2, any) };
            let phi = smp.formula(sig, &scope, 2, false);
            let inst = inst
                .with("r1", MetaValue::Rule(r1))
                .with("r2", MetaValue::Rule(r2))
                .with("phi", MetaValue::Formula(phi));
            plain(instantiate_schema(schema, &inst, sig)?)
        }
    };
    Ok(Some(case))
}

/// A valuation falsifying the instance, if one of the sampled ones does.
fn refute(
    case: &Case,
    smp: &mut Sampler,
    s: &State,
    valuations: usize,
    limits: &Limits,
    opts: EvalOptions,
) -> Result<Option<Valuation>> {
    let free: Vec<Var> = case.instance.free_variables().into_iter().collect();
    for _ in 0..valuations {
        let mut val = Valuation::new();
        for v in free.iter().filter(|v| v.sort.individual().is_some()) {
            smp.bind(&mut val, v.clone(), s);
        }
        for v in free.iter().filter(|v| v.sort.individual().is_none()) {
            smp.bind(&mut val, v.clone(), s);
        }
        for (x, r) in &case.from_delta {
            if smp.coin(0.6) {
                let fam = delta(r, s, &val, limits)?;
                let members: Vec<_> = fam.iter().cloned().collect();
                if !members.is_empty() {
                    let pick = members[smp.below(members.len())].clone();
                    val.bind_set(x.clone(), pick);
                }
            }
        }
        if let Some((x, f, args, y)) = &case.planted {
            if smp.coin(0.6) {
                let args = args.iter().map(|t| eval_term(t, s, &val)).collect::<Result<Vec<_>>>()?;
                let value = eval_term(y, s, &val)?;
                let mut u = val.get_set(x).cloned().unwrap_or_default();
                u.insert(Update::new(*f, args, value));
                val.bind_set(x.clone(), u);
            }
        }
        if !eval_with(&case.instance, s, &val, limits, opts)? {
            return Ok(Some(val));
        }
    }
    Ok(None)
}

/// `x = a, X = {..}` in variable order.
pub fn valuation_text(val: &Valuation, s: &State) -> String {
    let (sig, univ) = (s.signature(), s.universe());
    let mut parts: Vec<String> = val.individuals().map(|(v, e)| format!("{} = {}", var_text(v), univ.name(*e))).collect();
    parts.extend(val.set_bindings().map(|(v, u)| format!("{} = {}", var_text(v), update_set_text(sig, univ, u))));
    parts.extend(val.tagged_bindings().map(|(v, u)| {
        let items: Vec<String> = u
            .iter()
            .map(|t| {
                let inner = crate::syntax::printer::update_text(sig, univ, &t.update);
                format!("{} @ {}", inner, univ.name(t.tag))
            })
            .collect();
        format!("{} = {{{}}}", var_text(v), items.join(", "))
    }));
    parts.join(", ")
}
