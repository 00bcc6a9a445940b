use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Instantiation, MetaKind, MetaValue, RuleId, SchemaId};
use crate::error::{Error, Result};
use crate::model::{Func, Signature, Sort};
use crate::syntax::derived::{con, con_uset};
use crate::syntax::ops::{alpha_eq, check_rule, is_pure, is_static, is_static_term, sort_of, substitute, Replacement};
use crate::syntax::{Formula, FreeVars, Fresh, Rule, Term, Var, VarSort};
use crate::translate::upd_rhs;

fn ill(msg: impl Into<String>) -> Error {
    Error::IllFormedInstantiation(msg.into())
}

/// Checks names and kinds of the supplied metavariables.
fn check_metas<'a>(
    inst: &Instantiation,
    expected: impl Iterator<Item = (&'a str, MetaKind, bool)> + Clone,
    what: &str,
) -> Result<()> {
    for (name, v) in &inst.0 {
        let Some((_, kind, _)) = expected.clone().find(|(n, _, _)| n == name) else {
            return Err(ill(format!("{what} has no metavariable `{name}`")));
        };
        let ok = matches!(
            (kind, v),
            (MetaKind::Formula, MetaValue::Formula(_))
                | (MetaKind::Var, MetaValue::Var(_))
                | (MetaKind::Term, MetaValue::Term(_))
                | (MetaKind::TermOrVar, MetaValue::Term(_) | MetaValue::Var(_))
                | (MetaKind::Rule, MetaValue::Rule(_))
                | (MetaKind::Func, MetaValue::Func(_))
                | (MetaKind::Terms, MetaValue::Terms(_))
        ) || matches!((kind, v), (MetaKind::SetVar, MetaValue::Var(x)) if x.sort == VarSort::Set);
        if !ok {
            return Err(ill(format!("metavariable `{name}` of {what} has the wrong kind")));
        }
    }
    for (name, _, required) in expected {
        if required && inst.get(name).is_none() {
            return Err(ill(format!("{what} needs metavariable `{name}`")));
        }
    }
    Ok(())
}

pub(super) fn check_rule_metas(rule: RuleId, inst: &Instantiation) -> Result<()> {
    check_metas(inst, rule.metas().iter().copied(), rule.name())
}

struct Get<'a>(&'a Instantiation);

impl<'a> Get<'a> {
    fn formula(&self, n: &str) -> &'a Formula {
        match self.0.get(n) {
            Some(MetaValue::Formula(f)) => f,
            _ => unreachable!("metavariables checked"),
        }
    }

    fn var(&self, n: &str) -> &'a Var {
        match self.0.get(n) {
            Some(MetaValue::Var(v)) => v,
            _ => unreachable!("metavariables checked"),
        }
    }

    fn term(&self, n: &str) -> &'a Term {
        match self.0.get(n) {
            Some(MetaValue::Term(t)) => t,
            _ => unreachable!("metavariables checked"),
        }
    }

    fn terms(&self, n: &str) -> &'a [Term] {
        match self.0.get(n) {
            Some(MetaValue::Terms(t)) => t,
            _ => unreachable!("metavariables checked"),
        }
    }

    fn rule(&self, n: &str) -> &'a Rule {
        match self.0.get(n) {
            Some(MetaValue::Rule(r)) => r,
            _ => unreachable!("metavariables checked"),
        }
    }

    fn func(&self, n: &str) -> Func {
        match self.0.get(n) {
            Some(MetaValue::Func(f)) => *f,
            _ => unreachable!("metavariables checked"),
        }
    }
}

fn fresh_for(sig: &Signature, inst: &Instantiation) -> Fresh {
    let mut fresh = Fresh::for_signature(sig);
    for v in inst.0.values() {
        match v {
            MetaValue::Formula(f) => fresh.avoid_formula(f),
            MetaValue::Var(x) => fresh.avoid(x),
            MetaValue::Term(t) => fresh.avoid_term(t),
            MetaValue::Terms(ts) => ts.iter().for_each(|t| fresh.avoid_term(t)),
            MetaValue::Rule(r) => fresh.avoid_rule(r),
            MetaValue::Func(_) => {}
        }
    }
    fresh
}

fn check_term(t: &Term, sort: Sort, sig: &Signature, what: &str) -> Result<()> {
    let s = sort_of(t, sig).map_err(|e| ill(format!("{what}: {e}")))?;
    if s != sort {
        return Err(ill(format!("{what} has the wrong sort")));
    }
    Ok(())
}

fn static_terms(ts: &[Term], sig: &Signature, what: &str) -> Result<()> {
    if ts.iter().all(|t| is_static_term(t, sig)) {
        Ok(())
    } else {
        Err(ill(format!("side condition: {what} must be static terms")))
    }
}

/// `f(args)` and `y` of the frame axioms.
fn location(sig: &Signature, g: &Get) -> Result<(Func, Vec<Term>, Term)> {
    let f = g.func("f");
    let d = sig.decl(f);
    if !d.dynamic {
        return Err(ill(format!("`{}` is not a dynamic function", d.name)));
    }
    let args = g.terms("args").to_vec();
    if args.len() != d.arity {
        return Err(ill(format!("`{}` expects {} arguments", d.name, d.arity)));
    }
    for t in &args {
        check_term(t, d.kind.arg_sort(), sig, "argument")?;
    }
    let y = g.term("y").clone();
    check_term(&y, d.kind.value_sort(), sig, "value")?;
    let mut all = args.clone();
    all.push(y.clone());
    static_terms(&all, sig, "arguments and value")?;
    Ok((f, args, y))
}

/// The instance of an axiom schema.
pub fn instantiate_schema(id: SchemaId, inst: &Instantiation, sig: &Signature) -> Result<Formula> {
    check_metas(inst, id.metas().iter().map(|&(n, k)| (n, k, true)), id.name())?;
    let g = Get(inst);
    let mut fresh = fresh_for(sig, inst);
    for v in inst.0.values() {
        if let MetaValue::Rule(r) = v {
            check_rule(r, sig).map_err(|e| ill(format!("rule: {e}")))?;
        }
        if let MetaValue::Formula(f) = v {
            crate::syntax::check_formula(f, sig).map_err(|e| ill(format!("formula: {e}")))?;
        }
    }
    use Formula as F;
    let out = match id {
        SchemaId::U1 | SchemaId::U2 | SchemaId::U3 | SchemaId::U4 | SchemaId::U5 | SchemaId::U6 | SchemaId::U7 => {
            let r = g.rule("r");
            let x = g.var("X");
            let fits = match (id, r) {
                (SchemaId::U1, Rule::Update { .. })
                | (SchemaId::U2, Rule::If { .. })
                | (SchemaId::U3, Rule::Forall { .. })
                | (SchemaId::U4, Rule::Par(..))
                | (SchemaId::U7, Rule::Seq(..)) => true,
                (SchemaId::U5, Rule::Choose { var, .. }) => var.sort == VarSort::Primary,
                (SchemaId::U6, Rule::Choose { var, .. }) => var.sort == VarSort::Secondary,
                _ => false,
            };
            if !fits {
                return Err(ill(format!("{} does not apply to a rule of this form", id.name())));
            }
            F::iff(F::upd(r.clone(), x.clone()), upd_rhs(sig, r, x, &mut fresh))
        }
        SchemaId::M1 => {
            let (x, phi, psi) = (g.var("X"), g.formula("phi"), g.formula("psi"));
            F::implies(
                F::modal(x.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(F::modal(x.clone(), phi.clone()), F::modal(x.clone(), psi.clone())),
            )
        }
        SchemaId::M4 => {
            let (x, phi) = (g.var("X"), g.formula("phi"));
            F::implies(F::not(con_uset(sig, x, &mut fresh)), F::modal(x.clone(), phi.clone()))
        }
        SchemaId::M5 => {
            let (x, phi) = (g.var("X"), g.formula("phi"));
            F::implies(F::not(F::modal(x.clone(), phi.clone())), F::modal(x.clone(), F::not(phi.clone())))
        }
        SchemaId::M6 => {
            let (v, x, phi) = (g.var("x"), g.var("X"), g.formula("phi"));
            if v == x {
                return Err(ill("M6: the quantified variable must differ from X"));
            }
            F::implies(
                F::forall(v.clone(), F::modal(x.clone(), phi.clone())),
                F::modal(x.clone(), F::forall(v.clone(), phi.clone())),
            )
        }
        SchemaId::M7 | SchemaId::M8 => {
            let (r, x, phi) = (g.rule("r"), g.var("X"), g.formula("phi"));
            if !(is_static(phi, sig) || is_pure(phi)) {
                return Err(ill(format!("side condition: {} needs a static or pure formula", id.name())));
            }
            let c = con(sig, r, x, &mut fresh);
            if id == SchemaId::M7 {
                F::implies(F::and(c, phi.clone()), F::modal(x.clone(), phi.clone()))
            } else {
                F::implies(F::and(c, F::modal(x.clone(), phi.clone())), phi.clone())
            }
        }
        SchemaId::A1 => {
            let x = g.var("X");
            let (f, args, y) = location(sig, &g)?;
            let z = crate::syntax::derived::fresh_ind(&mut fresh, sig.decl(f).kind.value_sort());
            let untouched =
                F::forall(z.clone(), F::not(F::In1 { set: x.clone(), func: f, args: args.clone(), value: Term::var(&z) }));
            let now = F::eq(Term::App(f, args), y);
            F::implies(F::conj([con_uset(sig, x, &mut fresh), untouched, now.clone()]), F::modal(x.clone(), now))
        }
        SchemaId::A2 => {
            let x = g.var("X");
            let (f, args, y) = location(sig, &g)?;
            let member = F::In1 { set: x.clone(), func: f, args: args.clone(), value: y.clone() };
            F::implies(F::and(con_uset(sig, x, &mut fresh), member), F::modal(x.clone(), F::eq(Term::App(f, args), y)))
        }
        SchemaId::P1 => {
            let (phi, psi) = (g.formula("phi"), g.formula("psi"));
            F::implies(phi.clone(), F::implies(psi.clone(), phi.clone()))
        }
        SchemaId::P2 => {
            let (phi, psi, chi) = (g.formula("phi"), g.formula("psi"), g.formula("chi"));
            F::implies(
                F::implies(phi.clone(), F::implies(psi.clone(), chi.clone())),
                F::implies(F::implies(phi.clone(), psi.clone()), F::implies(phi.clone(), chi.clone())),
            )
        }
        SchemaId::P3 => {
            let (phi, psi) = (g.formula("phi"), g.formula("psi"));
            F::implies(F::implies(F::not(phi.clone()), F::not(psi.clone())), F::implies(psi.clone(), phi.clone()))
        }
        SchemaId::EQ1 => {
            let t = g.term("t");
            sort_of(t, sig).map_err(|e| ill(format!("term: {e}")))?;
            static_terms(core::slice::from_ref(t), sig, "t")?;
            F::eq(t.clone(), t.clone())
        }
        SchemaId::EQ2 => {
            let f = g.func("f");
            let d = sig.decl(f);
            let (lhs, rhs) = (g.terms("lhs"), g.terms("rhs"));
            if d.arity == 0 {
                return Err(ill("EQ2 needs a function of positive arity"));
            }
            if lhs.len() != d.arity || rhs.len() != d.arity {
                return Err(ill(format!("`{}` expects {} arguments", d.name, d.arity)));
            }
            for t in lhs.iter().chain(rhs) {
                check_term(t, d.kind.arg_sort(), sig, "argument")?;
            }
            static_terms(lhs, sig, "lhs")?;
            static_terms(rhs, sig, "rhs")?;
            let eqs = lhs.iter().zip(rhs).map(|(a, b)| F::eq(a.clone(), b.clone()));
            F::implies(F::conj(eqs), F::eq(Term::App(f, lhs.to_vec()), Term::App(f, rhs.to_vec())))
        }
        SchemaId::DY1 => {
            let (r1, r2, phi) = (g.rule("r1"), g.rule("r2"), g.formula("phi"));
            let x = fresh.var("X", VarSort::Set);
            let x1 = fresh.var("X", VarSort::Set);
            let x2 = fresh.var("X", VarSort::Set);
            let seq = Rule::seq(r1.clone(), r2.clone());
            let lhs = F::exists(x.clone(), F::and(F::upd(seq, x.clone()), F::modal(x, phi.clone())));
            let inner = F::exists(x2.clone(), F::and(F::upd(r2.clone(), x2.clone()), F::modal(x2, phi.clone())));
            let rhs = F::exists(x1.clone(), F::and(F::upd(r1.clone(), x1.clone()), F::modal(x1, inner)));
            F::iff(lhs, rhs)
        }
        SchemaId::E => {
            let (r1, r2, phi) = (g.rule("r1"), g.rule("r2"), g.formula("phi"));
            let x1 = fresh.var("X", VarSort::Set);
            let x2 = fresh.var("X", VarSort::Set);
            F::exists_many(
                alloc::vec![x1.clone(), x2.clone()],
                F::iff(
                    F::and(F::upd(r1.clone(), x1.clone()), F::modal(x1, phi.clone())),
                    F::and(F::upd(r2.clone(), x2.clone()), F::modal(x2, phi.clone())),
                ),
            )
        }
    };
    Ok(out)
}

/// `φ[t/x]` where the replacement is either a term or a predicate variable.
fn replace(phi: &Formula, x: &Var, t: &MetaValue) -> Result<Formula> {
    let with = match t {
        MetaValue::Term(t) => Replacement::Term(t.clone()),
        MetaValue::Var(v) => Replacement::Var(v.clone()),
        _ => unreachable!("metavariables checked"),
    };
    if let Replacement::Var(v) = &with {
        if v.sort != x.sort {
            return Err(ill("replacement has the wrong sort"));
        }
    }
    substitute(phi, x, &with)
}

fn replacement_static(t: &MetaValue, sig: &Signature) -> bool {
    match t {
        MetaValue::Term(t) => is_static_term(t, sig),
        _ => true,
    }
}

fn replacement_sort_ok(t: &MetaValue, x: &Var, sig: &Signature) -> Result<()> {
    match (t, x.sort.individual()) {
        (MetaValue::Term(t), Some(s)) => check_term(t, s, sig, "t"),
        (MetaValue::Var(v), _) if v.sort == x.sort => Ok(()),
        (MetaValue::Term(Term::Var(v)), None) if v.sort == x.sort => Ok(()),
        _ => Err(ill("t has the wrong sort for the quantified variable")),
    }
}

fn as_exists(f: &Formula) -> Option<(&Var, &Formula)> {
    if let Formula::Not(a) = f {
        if let Formula::Forall(v, b) = a.as_ref() {
            if let Formula::Not(body) = b.as_ref() {
                return Some((v, body));
            }
        }
    }
    None
}

/// Checks a rule application syntactically: the conclusion has the right
/// shape relative to the premises and the side conditions on purity and
/// staticness hold. Semantic certificates are handled by the caller.
pub(super) fn check_rule_shape(
    rule: RuleId,
    premises: &[&Formula],
    conclusion: &Formula,
    inst: &Instantiation,
    sig: &Signature,
) -> Result<(), String> {
    check_rule_metas(rule, inst).map_err(|e| e.to_string_plain())?;
    let mismatch = || Err(format!("formula does not follow from the premises by {}", rule.name()));
    let side = |phi: &Formula, t: &MetaValue| -> Result<(), String> {
        if is_pure(phi) || replacement_static(t, sig) {
            Ok(())
        } else {
            Err(format!("side condition: {} needs a pure formula or a static term", rule.name()))
        }
    };
    match rule {
        RuleId::M2 => {
            let x = Get(inst).var("X");
            if alpha_eq(conclusion, &Formula::modal(x.clone(), premises[0].clone())) {
                Ok(())
            } else {
                mismatch()
            }
        }
        RuleId::M3 => {
            let Formula::Not(inner) = premises[1] else { return mismatch() };
            let Formula::And(a, nb) = inner.as_ref() else { return mismatch() };
            let Formula::Not(b) = nb.as_ref() else { return mismatch() };
            if alpha_eq(a, premises[0]) && alpha_eq(b, conclusion) {
                Ok(())
            } else {
                mismatch()
            }
        }
        RuleId::UI => {
            let Formula::Forall(x, phi) = premises[0] else { return mismatch() };
            let t = inst.get("t").unwrap();
            replacement_sort_ok(t, x, sig).map_err(|e| e.to_string_plain())?;
            side(phi, t)?;
            let expected = replace(phi, x, t).map_err(|e| e.to_string_plain())?;
            if alpha_eq(&expected, conclusion) {
                Ok(())
            } else {
                mismatch()
            }
        }
        RuleId::EG => {
            let Some((x, phi)) = as_exists(conclusion) else { return mismatch() };
            let t = inst.get("t").unwrap();
            replacement_sort_ok(t, x, sig).map_err(|e| e.to_string_plain())?;
            side(phi, t)?;
            let expected = replace(phi, x, t).map_err(|e| e.to_string_plain())?;
            if alpha_eq(&expected, premises[0]) {
                Ok(())
            } else {
                mismatch()
            }
        }
        RuleId::UG => {
            let Formula::Forall(x, phi) = conclusion else { return mismatch() };
            let own = MetaValue::Var(x.clone());
            let t = inst.get("t").unwrap_or(&own);
            replacement_sort_ok(t, x, sig).map_err(|e| e.to_string_plain())?;
            side(phi, t)?;
            let expected = replace(phi, x, t).map_err(|e| e.to_string_plain())?;
            if alpha_eq(&expected, premises[0]) {
                Ok(())
            } else {
                mismatch()
            }
        }
        RuleId::EI => {
            let Some((x, phi)) = as_exists(premises[0]) else { return mismatch() };
            let t = inst.get("t").unwrap();
            replacement_sort_ok(t, x, sig).map_err(|e| e.to_string_plain())?;
            side(phi, t)?;
            let expected = replace(phi, x, t).map_err(|e| e.to_string_plain())?;
            if alpha_eq(&expected, conclusion) {
                Ok(())
            } else {
                mismatch()
            }
        }
    }
}

/// What a certificate must establish for a rule application, before
/// universal closure.
pub(super) fn certified_claim(rule: RuleId, premises: &[&Formula], conclusion: &Formula) -> Formula {
    match rule {
        // the chosen witness satisfies φ whenever some witness does
        RuleId::EI => Formula::implies(premises[0].clone(), conclusion.clone()),
        // UG: every instance φ[a/x] holds, i.e. ∀x φ
        _ => conclusion.clone(),
    }
}

/// ∀-closure over all free variables of every sort.
pub(super) fn closure(f: &Formula) -> Formula {
    let free: Vec<Var> = f.free_variables().into_iter().collect();
    Formula::forall_many(free, f.clone())
}

trait PlainMessage {
    fn to_string_plain(&self) -> String;
}

impl PlainMessage for Error {
    fn to_string_plain(&self) -> String {
        match self {
            Error::IllFormedInstantiation(m) | Error::Sort(m) | Error::State(m) => m.clone(),
            e => format!("{e}"),
        }
    }
}
