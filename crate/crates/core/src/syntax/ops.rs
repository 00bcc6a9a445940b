//! Structural operations on terms, rules and formulas: free variables,
//! sort checking, capture-avoiding substitution and alpha-equivalence.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Formula, Rule, Term, Var, VarSort};
use crate::error::{Error, Result};
use crate::model::{Signature, Sort};

/// Free variables of terms, rules and formulas.
pub trait FreeVars {
    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>);

    fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn has_free(&self, v: &Var) -> bool {
        self.free_variables().contains(v)
    }
}

fn note(v: &Var, bound: &[Var], out: &mut BTreeSet<Var>) {
    if !bound.contains(v) {
        out.insert(v.clone());
    }
}

impl FreeVars for Term {
    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => note(v, bound, out),
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }
}

impl FreeVars for Rule {
    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Rule::Update { args, value, .. } => {
                args.iter().for_each(|a| a.collect_free(bound, out));
                value.collect_free(bound, out);
            }
            Rule::If { guard, body } => {
                guard.collect_free(bound, out);
                body.collect_free(bound, out);
            }
            Rule::Forall { var, guard, body } | Rule::Choose { var, guard, body } => {
                bound.push(var.clone());
                guard.collect_free(bound, out);
                body.collect_free(bound, out);
                bound.pop();
            }
            Rule::Par(a, b) | Rule::Seq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }
}

impl FreeVars for Formula {
    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::In1 { set, args, value, .. } => {
                note(set, bound, out);
                args.iter().for_each(|a| a.collect_free(bound, out));
                value.collect_free(bound, out);
            }
            Formula::In2 { set, args, value, tag, .. } => {
                note(set, bound, out);
                args.iter().for_each(|a| a.collect_free(bound, out));
                value.collect_free(bound, out);
                tag.collect_free(bound, out);
            }
            Formula::Upd(r, x) => {
                r.collect_free(bound, out);
                note(x, bound, out);
            }
            Formula::Modal(x, a) => {
                note(x, bound, out);
                a.collect_free(bound, out);
            }
        }
    }
}

/// A rule is closed when every variable is bound by forall or choose.
pub fn is_closed(r: &Rule) -> bool {
    r.free_variables().is_empty()
}

/// Every variable occurring anywhere, bound occurrences included.
pub fn all_vars_formula(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Eq(a, b) => {
            all_vars_term(a, out);
            all_vars_term(b, out);
        }
        Formula::Not(a) => all_vars_formula(a, out),
        Formula::And(a, b) => {
            all_vars_formula(a, out);
            all_vars_formula(b, out);
        }
        Formula::Forall(v, a) | Formula::Modal(v, a) => {
            out.insert(v.clone());
            all_vars_formula(a, out);
        }
        Formula::In1 { set, args, value, .. } => {
            out.insert(set.clone());
            args.iter().for_each(|a| all_vars_term(a, out));
            all_vars_term(value, out);
        }
        Formula::In2 { set, args, value, tag, .. } => {
            out.insert(set.clone());
            args.iter().for_each(|a| all_vars_term(a, out));
            all_vars_term(value, out);
            all_vars_term(tag, out);
        }
        Formula::Upd(r, x) => {
            all_vars_rule(r, out);
            out.insert(x.clone());
        }
    }
}

pub fn all_vars_rule(r: &Rule, out: &mut BTreeSet<Var>) {
    match r {
        Rule::Update { args, value, .. } => {
            args.iter().for_each(|a| all_vars_term(a, out));
            all_vars_term(value, out);
        }
        Rule::If { guard, body } => {
            all_vars_formula(guard, out);
            all_vars_rule(body, out);
        }
        Rule::Forall { var, guard, body } | Rule::Choose { var, guard, body } => {
            out.insert(var.clone());
            all_vars_formula(guard, out);
            all_vars_rule(body, out);
        }
        Rule::Par(a, b) | Rule::Seq(a, b) => {
            all_vars_rule(a, out);
            all_vars_rule(b, out);
        }
    }
}

pub fn all_vars_term(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| all_vars_term(a, out)),
    }
}

/// Generator of variables that clash with nothing seen so far.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    used: BTreeSet<Var>,
    reserved: BTreeSet<alloc::sync::Arc<str>>,
}

impl Fresh {
    pub fn new() -> Self {
        Fresh::default()
    }

    /// A generator whose unprefixed names never collide with function
    /// symbols, so printed output parses back to the same variables.
    pub fn for_signature(sig: &Signature) -> Self {
        let mut fresh = Fresh::new();
        fresh.reserve(sig);
        fresh
    }

    pub fn reserve(&mut self, sig: &Signature) {
        self.reserved.extend(sig.funcs().map(|f| sig.decl(f).name.clone()));
    }

    fn taken(&self, v: &Var) -> bool {
        self.used.contains(v)
            || (matches!(v.sort, VarSort::Primary | VarSort::Set) && self.reserved.contains(&v.name))
            || super::parser::is_keyword(&v.name)
    }

    pub fn avoiding_formula(f: &Formula) -> Self {
        let mut fresh = Fresh::new();
        all_vars_formula(f, &mut fresh.used);
        fresh
    }

    pub fn avoid_formula(&mut self, f: &Formula) {
        all_vars_formula(f, &mut self.used);
    }

    pub fn avoid_rule(&mut self, r: &Rule) {
        all_vars_rule(r, &mut self.used);
    }

    pub fn avoid_term(&mut self, t: &Term) {
        all_vars_term(t, &mut self.used);
    }

    pub fn avoid(&mut self, v: &Var) {
        self.used.insert(v.clone());
    }

    /// A new variable of the given sort named after `base`.
    pub fn var(&mut self, base: &str, sort: VarSort) -> Var {
        let plain = Var::new(base, sort);
        if !self.taken(&plain) {
            self.used.insert(plain.clone());
            return plain;
        }
        let mut i = 1usize;
        loop {
            let v = Var::new(&format!("{base}{i}"), sort);
            if !self.taken(&v) {
                self.used.insert(v.clone());
                return v;
            }
            i += 1;
        }
    }

    /// Default-named individual variable of a sort.
    pub fn individual(&mut self, sort: Sort) -> Var {
        match sort {
            Sort::Primary => self.var("v", VarSort::Primary),
            Sort::Secondary => self.var("w", VarSort::Secondary),
        }
    }
}

/// Sort of a term under the metafinite discipline: point terms are primary,
/// algorithmic terms secondary.
pub fn sort_of(t: &Term, sig: &Signature) -> Result<Sort> {
    match t {
        Term::Var(v) => v
            .sort
            .individual()
            .ok_or_else(|| Error::Sort(format!("predicate variable `{}` used as a term", v.name))),
        Term::App(f, args) => {
            if (f.0 as usize) >= sig.len() {
                return Err(Error::Sort("unknown function symbol".into()));
            }
            let d = sig.decl(*f);
            if args.len() != d.arity {
                return Err(Error::Sort(format!("`{}` expects {} arguments, got {}", d.name, d.arity, args.len())));
            }
            for a in args {
                let s = sort_of(a, sig)?;
                if s != d.kind.arg_sort() {
                    return Err(Error::Sort(format!(
                        "{} function `{}` applied to a {} term",
                        d.kind.keyword(),
                        d.name,
                        sort_word(s)
                    )));
                }
            }
            Ok(d.kind.value_sort())
        }
    }
}

pub fn sort_word(s: Sort) -> &'static str {
    match s {
        Sort::Primary => "point",
        Sort::Secondary => "algorithmic",
    }
}

fn expect_sort(t: &Term, want: Sort, sig: &Signature, what: &str) -> Result<()> {
    let s = sort_of(t, sig)?;
    if s != want {
        return Err(Error::Sort(format!("{what} must be a {} term", sort_word(want))));
    }
    Ok(())
}

/// Full well-sortedness check of a formula.
pub fn check_formula(f: &Formula, sig: &Signature) -> Result<()> {
    match f {
        Formula::Eq(a, b) => {
            let sa = sort_of(a, sig)?;
            let sb = sort_of(b, sig)?;
            if sa != sb {
                return Err(Error::Sort("equality between terms of different sorts".into()));
            }
            Ok(())
        }
        Formula::Not(a) => check_formula(a, sig),
        Formula::And(a, b) => {
            check_formula(a, sig)?;
            check_formula(b, sig)
        }
        Formula::Forall(_, a) => check_formula(a, sig),
        Formula::In1 { set, func, args, value } | Formula::In2 { set, func, args, value, .. } => {
            let want = if matches!(f, Formula::In1 { .. }) { VarSort::Set } else { VarSort::TaggedSet };
            if set.sort != want {
                return Err(Error::Sort(format!("`{}` has the wrong predicate sort for this membership", set.name)));
            }
            check_dynamic_args(*func, args, value, sig)?;
            if let Formula::In2 { tag, .. } = f {
                expect_sort(tag, Sort::Primary, sig, "a branch tag")?;
            }
            Ok(())
        }
        Formula::Upd(r, x) => {
            if x.sort != VarSort::Set {
                return Err(Error::Sort(format!("upd expects a set variable, got `{}`", x.name)));
            }
            check_rule(r, sig)
        }
        Formula::Modal(x, a) => {
            if x.sort != VarSort::Set {
                return Err(Error::Sort(format!("modality expects a set variable, got `{}`", x.name)));
            }
            check_formula(a, sig)
        }
    }
}

fn check_dynamic_args(func: crate::model::Func, args: &[Term], value: &Term, sig: &Signature) -> Result<()> {
    if (func.0 as usize) >= sig.len() {
        return Err(Error::Sort("unknown function symbol".into()));
    }
    let d = sig.decl(func);
    if !d.dynamic {
        return Err(Error::Sort(format!("`{}` is static", d.name)));
    }
    if args.len() != d.arity {
        return Err(Error::Sort(format!("`{}` expects {} arguments, got {}", d.name, d.arity, args.len())));
    }
    for a in args {
        expect_sort(a, d.kind.arg_sort(), sig, "an argument")?;
    }
    expect_sort(value, d.kind.value_sort(), sig, "the value")
}

/// Well-formedness of rules: dynamic update targets of matching kind,
/// first-order guards, sort-1 forall binders.
pub fn check_rule(r: &Rule, sig: &Signature) -> Result<()> {
    match r {
        Rule::Update { func, args, value } => check_dynamic_args(*func, args, value, sig),
        Rule::If { guard, body } => {
            check_guard(guard, sig)?;
            check_rule(body, sig)
        }
        Rule::Forall { var, guard, body } => {
            if var.sort != VarSort::Primary {
                return Err(Error::Sort(format!("forall binder `{}` must range over the primary carrier", var.name)));
            }
            check_guard(guard, sig)?;
            check_rule(body, sig)
        }
        Rule::Choose { var, guard, body } => {
            if var.sort.individual().is_none() {
                return Err(Error::Sort(format!("choose binder `{}` must be an individual variable", var.name)));
            }
            check_guard(guard, sig)?;
            check_rule(body, sig)
        }
        Rule::Par(a, b) | Rule::Seq(a, b) => {
            check_rule(a, sig)?;
            check_rule(b, sig)
        }
    }
}

/// Guards are first-order formulas over individual variables.
pub fn check_guard(f: &Formula, sig: &Signature) -> Result<()> {
    if !is_pure(f) {
        return Err(Error::Sort("rule guards must be first-order formulas".into()));
    }
    check_formula(f, sig)
}

/// Generated by equalities, negation, conjunction and individual quantifiers.
pub fn is_pure(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::Not(a) => is_pure(a),
        Formula::And(a, b) => is_pure(a) && is_pure(b),
        Formula::Forall(v, a) => v.sort.individual().is_some() && is_pure(a),
        _ => false,
    }
}

/// Every function symbol appearing in the formula (rules and membership
/// atoms included) is static.
pub fn is_static(f: &Formula, sig: &Signature) -> bool {
    let mut funcs = BTreeSet::new();
    funcs_formula(f, &mut funcs);
    funcs.iter().all(|&g| !sig.decl(g).dynamic)
}

pub fn is_static_term(t: &Term, sig: &Signature) -> bool {
    let mut funcs = BTreeSet::new();
    funcs_term(t, &mut funcs);
    funcs.iter().all(|&g| !sig.decl(g).dynamic)
}

fn funcs_term(t: &Term, out: &mut BTreeSet<crate::model::Func>) {
    if let Term::App(f, args) = t {
        out.insert(*f);
        args.iter().for_each(|a| funcs_term(a, out));
    }
}

fn funcs_rule(r: &Rule, out: &mut BTreeSet<crate::model::Func>) {
    match r {
        Rule::Update { func, args, value } => {
            out.insert(*func);
            args.iter().for_each(|a| funcs_term(a, out));
            funcs_term(value, out);
        }
        Rule::If { guard, body } | Rule::Forall { guard, body, .. } | Rule::Choose { guard, body, .. } => {
            funcs_formula(guard, out);
            funcs_rule(body, out);
        }
        Rule::Par(a, b) | Rule::Seq(a, b) => {
            funcs_rule(a, out);
            funcs_rule(b, out);
        }
    }
}

fn funcs_formula(f: &Formula, out: &mut BTreeSet<crate::model::Func>) {
    match f {
        Formula::Eq(a, b) => {
            funcs_term(a, out);
            funcs_term(b, out);
        }
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Modal(_, a) => funcs_formula(a, out),
        Formula::And(a, b) => {
            funcs_formula(a, out);
            funcs_formula(b, out);
        }
        Formula::In1 { func, args, value, .. } => {
            out.insert(*func);
            args.iter().for_each(|a| funcs_term(a, out));
            funcs_term(value, out);
        }
        Formula::In2 { func, args, value, tag, .. } => {
            out.insert(*func);
            args.iter().for_each(|a| funcs_term(a, out));
            funcs_term(value, out);
            funcs_term(tag, out);
        }
        Formula::Upd(r, _) => funcs_rule(r, out),
    }
}

/// No upd atoms and no modalities.
pub fn is_membership_fragment(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) | Formula::In1 { .. } | Formula::In2 { .. } => true,
        Formula::Not(a) | Formula::Forall(_, a) => is_membership_fragment(a),
        Formula::And(a, b) => is_membership_fragment(a) && is_membership_fragment(b),
        Formula::Upd(..) | Formula::Modal(..) => false,
    }
}

/// All atoms have the flat shapes `x = y`, `f(x̄) = y` and membership over
/// variables.
pub fn is_flat(f: &Formula) -> bool {
    let vars = |ts: &[Term]| ts.iter().all(|t| matches!(t, Term::Var(_)));
    match f {
        Formula::Eq(Term::Var(_), Term::Var(_)) => true,
        Formula::Eq(Term::App(_, args), Term::Var(_)) => vars(args),
        Formula::Eq(..) => false,
        Formula::In1 { args, value, .. } => vars(args) && matches!(value, Term::Var(_)),
        Formula::In2 { args, value, tag, .. } => {
            vars(args) && matches!(value, Term::Var(_)) && matches!(tag, Term::Var(_))
        }
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Modal(_, a) => is_flat(a),
        Formula::And(a, b) => is_flat(a) && is_flat(b),
        Formula::Upd(..) => true,
    }
}

/// What a variable is replaced by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replacement {
    Term(Term),
    Var(Var),
}

impl Replacement {
    fn free(&self) -> BTreeSet<Var> {
        match self {
            Replacement::Term(t) => t.free_variables(),
            Replacement::Var(v) => BTreeSet::from([v.clone()]),
        }
    }
}

/// Capture-avoiding substitution `σ[t/x]`: fails rather than renaming when
/// a free variable of the replacement would become bound.
pub struct Subst<'a> {
    pub var: &'a Var,
    pub with: &'a Replacement,
    free: BTreeSet<Var>,
}

impl<'a> Subst<'a> {
    pub fn new(var: &'a Var, with: &'a Replacement) -> Self {
        Subst { var, with, free: with.free() }
    }

    fn set_var(&self, v: &Var) -> Result<Var> {
        if v != self.var {
            return Ok(v.clone());
        }
        match self.with {
            Replacement::Var(w) if w.sort == v.sort => Ok(w.clone()),
            _ => Err(Error::IllFormedInstantiation(format!("`{}` must be replaced by a variable of its sort", v.name))),
        }
    }

    pub fn term(&self, t: &Term) -> Result<Term> {
        match t {
            Term::Var(v) if v == self.var => match self.with {
                Replacement::Term(r) => Ok(r.clone()),
                Replacement::Var(w) if w.sort == v.sort => Ok(Term::Var(w.clone())),
                Replacement::Var(_) => Err(Error::IllFormedInstantiation("replacement of the wrong sort".into())),
            },
            Term::Var(_) => Ok(t.clone()),
            Term::App(f, args) => Ok(Term::App(*f, args.iter().map(|a| self.term(a)).collect::<Result<_>>()?)),
        }
    }

    fn binder(&self, b: &Var, occurs: impl FnOnce() -> bool) -> Result<bool> {
        if b == self.var {
            return Ok(false);
        }
        if self.free.contains(b) && occurs() {
            return Err(Error::IllFormedInstantiation(format!(
                "substituting for `{}` would capture `{}`",
                self.var.name, b.name
            )));
        }
        Ok(true)
    }

    pub fn formula(&self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Eq(a, b) => Formula::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(a) => Formula::not(self.formula(a)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Forall(v, a) => {
                if self.binder(v, || a.has_free(self.var))? {
                    Formula::forall(v.clone(), self.formula(a)?)
                } else {
                    f.clone()
                }
            }
            Formula::In1 { set, func, args, value } => Formula::In1 {
                set: self.set_var(set)?,
                func: *func,
                args: args.iter().map(|a| self.term(a)).collect::<Result<_>>()?,
                value: self.term(value)?,
            },
            Formula::In2 { set, func, args, value, tag } => Formula::In2 {
                set: self.set_var(set)?,
                func: *func,
                args: args.iter().map(|a| self.term(a)).collect::<Result<_>>()?,
                value: self.term(value)?,
                tag: self.term(tag)?,
            },
            Formula::Upd(r, x) => Formula::upd(self.rule(r)?, self.set_var(x)?),
            Formula::Modal(x, a) => Formula::modal(self.set_var(x)?, self.formula(a)?),
        })
    }

    pub fn rule(&self, r: &Rule) -> Result<Rule> {
        Ok(match r {
            Rule::Update { func, args, value } => Rule::Update {
                func: *func,
                args: args.iter().map(|a| self.term(a)).collect::<Result<_>>()?,
                value: self.term(value)?,
            },
            Rule::If { guard, body } => Rule::if_then(self.formula(guard)?, self.rule(body)?),
            Rule::Forall { var, guard, body } | Rule::Choose { var, guard, body } => {
                if !self.binder(var, || guard.has_free(self.var) || body.has_free(self.var))? {
                    return Ok(r.clone());
                }
                let (g, b) = (self.formula(guard)?, self.rule(body)?);
                match r {
                    Rule::Forall { .. } => Rule::forall(var.clone(), g, b),
                    _ => Rule::choose(var.clone(), g, b),
                }
            }
            Rule::Par(a, b) => Rule::par(self.rule(a)?, self.rule(b)?),
            Rule::Seq(a, b) => Rule::seq(self.rule(a)?, self.rule(b)?),
        })
    }
}

/// `f[t/x]`, failing on capture.
pub fn substitute(f: &Formula, x: &Var, with: &Replacement) -> Result<Formula> {
    Subst::new(x, with).formula(f)
}

/// Renames the bound variable of a quantifier body: `body[fresh/old]`.
pub fn rename(f: &Formula, old: &Var, fresh: &Var) -> Formula {
    substitute(f, old, &Replacement::Var(fresh.clone())).expect("renaming to a fresh variable cannot capture")
}

/// Alpha-equivalence of formulas (bound variable names are irrelevant).
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    Alpha::default().formula(a, b)
}

pub fn alpha_eq_rule(a: &Rule, b: &Rule) -> bool {
    Alpha::default().rule(a, b)
}

#[derive(Default)]
struct Alpha {
    left: Vec<Var>,
    right: Vec<Var>,
}

impl Alpha {
    fn var(&self, a: &Var, b: &Var) -> bool {
        let ia = self.left.iter().rposition(|v| v == a);
        let ib = self.right.iter().rposition(|v| v == b);
        match (ia, ib) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }

    fn term(&self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.var(x, y),
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
            }
            _ => false,
        }
    }

    fn terms(&self, a: &[Term], b: &[Term]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.term(x, y))
    }

    fn bind<R>(&mut self, a: &Var, b: &Var, k: impl FnOnce(&mut Self) -> R) -> Option<R> {
        if a.sort != b.sort {
            return None;
        }
        self.left.push(a.clone());
        self.right.push(b.clone());
        let r = k(self);
        self.left.pop();
        self.right.pop();
        Some(r)
    }

    fn formula(&mut self, a: &Formula, b: &Formula) -> bool {
        match (a, b) {
            (Formula::Eq(a1, a2), Formula::Eq(b1, b2)) => self.term(a1, b1) && self.term(a2, b2),
            (Formula::Not(x), Formula::Not(y)) => self.formula(x, y),
            (Formula::And(a1, a2), Formula::And(b1, b2)) => self.formula(a1, b1) && self.formula(a2, b2),
            (Formula::Forall(v, x), Formula::Forall(w, y)) => self.bind(v, w, |s| s.formula(x, y)).unwrap_or(false),
            (
                Formula::In1 { set: s1, func: f1, args: a1, value: v1 },
                Formula::In1 { set: s2, func: f2, args: a2, value: v2 },
            ) => self.var(s1, s2) && f1 == f2 && self.terms(a1, a2) && self.term(v1, v2),
            (
                Formula::In2 { set: s1, func: f1, args: a1, value: v1, tag: t1 },
                Formula::In2 { set: s2, func: f2, args: a2, value: v2, tag: t2 },
            ) => self.var(s1, s2) && f1 == f2 && self.terms(a1, a2) && self.term(v1, v2) && self.term(t1, t2),
            (Formula::Upd(r1, x1), Formula::Upd(r2, x2)) => self.var(x1, x2) && self.rule(r1, r2),
            (Formula::Modal(x1, p), Formula::Modal(x2, q)) => self.var(x1, x2) && self.formula(p, q),
            _ => false,
        }
    }

    fn rule(&mut self, a: &Rule, b: &Rule) -> bool {
        match (a, b) {
            (
                Rule::Update { func: f1, args: a1, value: v1 },
                Rule::Update { func: f2, args: a2, value: v2 },
            ) => f1 == f2 && self.terms(a1, a2) && self.term(v1, v2),
            (Rule::If { guard: g1, body: b1 }, Rule::If { guard: g2, body: b2 }) => {
                self.formula(g1, g2) && self.rule(b1, b2)
            }
            (
                Rule::Forall { var: v1, guard: g1, body: b1 },
                Rule::Forall { var: v2, guard: g2, body: b2 },
            )
            | (
                Rule::Choose { var: v1, guard: g1, body: b1 },
                Rule::Choose { var: v2, guard: g2, body: b2 },
            ) => self.bind(v1, v2, |s| s.formula(g1, g2) && s.rule(b1, b2)).unwrap_or(false),
            (Rule::Par(a1, a2), Rule::Par(b1, b2)) | (Rule::Seq(a1, a2), Rule::Seq(b1, b2)) => {
                self.rule(a1, b1) && self.rule(a2, b2)
            }
            _ => false,
        }
    }
}

/// Name of a variable as written in source text.
pub fn var_text(v: &Var) -> String {
    match v.sort {
        VarSort::Primary | VarSort::Set => String::from(&*v.name),
        VarSort::Secondary => format!("${}", v.name),
        VarSort::TaggedSet => format!("@{}", v.name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FuncKind, Signature};
    use alloc::vec;

    fn sig() -> (Signature, crate::model::Func, crate::model::Func, crate::model::Func) {
        let mut s = Signature::new();
        let f = s.declare("f", 1, FuncKind::Primary, true).unwrap();
        let g = s.declare("g", 1, FuncKind::Secondary, false).unwrap();
        let b = s.declare("b", 1, FuncKind::Bridge, false).unwrap();
        (s, f, g, b)
    }

    #[test]
    fn sort_examples() {
        let (s, f, g, b) = sig();
        let x = Term::Var(Var::primary("x"));
        assert_eq!(sort_of(&x, &s), Ok(Sort::Primary));
        assert_eq!(sort_of(&Term::App(b, vec![x.clone()]), &s), Ok(Sort::Secondary));
        let alg = Term::App(b, vec![x.clone()]);
        assert!(sort_of(&Term::App(f, vec![alg.clone()]), &s).is_err());
        assert_eq!(sort_of(&Term::App(g, vec![alg]), &s), Ok(Sort::Secondary));
    }

    #[test]
    fn free_variable_examples() {
        let (_, f, _, _) = sig();
        let (x, y, z) = (Var::primary("x"), Var::primary("y"), Var::primary("z"));
        let upd = Rule::update(f, vec![Term::var(&x)], Term::var(&y));
        assert_eq!(upd.free_variables(), BTreeSet::from([x.clone(), y.clone()]));
        let guard = Formula::eq(Term::var(&x), Term::var(&z));
        let r = Rule::choose(x.clone(), guard, Rule::update(f, vec![Term::var(&x)], Term::var(&x)));
        assert_eq!(r.free_variables(), BTreeSet::from([z]));
        assert!(!is_closed(&r));
    }

    #[test]
    fn static_and_pure_examples() {
        let (s, f, _, _) = sig();
        let (x, y) = (Term::Var(Var::primary("x")), Term::Var(Var::primary("y")));
        let eq = Formula::eq(x.clone(), y.clone());
        assert!(is_pure(&eq) && is_static(&eq, &s));
        let dynamic = Formula::eq(Term::App(f, vec![x.clone()]), y.clone());
        assert!(is_pure(&dynamic) && !is_static(&dynamic, &s));
        let upd = Formula::upd(Rule::update(f, vec![x], y), Var::set("X"));
        assert!(!is_pure(&upd) && !is_static(&upd, &s));
    }

    #[test]
    fn substitution_detects_capture() {
        let (x, y) = (Var::primary("x"), Var::primary("y"));
        let body = Formula::forall(y.clone(), Formula::eq(Term::var(&x), Term::var(&y)));
        let ok = substitute(&body, &x, &Replacement::Term(Term::Var(Var::primary("z")))).unwrap();
        assert!(alpha_eq(&ok, &Formula::forall(y.clone(), Formula::eq(Term::Var(Var::primary("z")), Term::var(&y)))));
        assert!(substitute(&body, &x, &Replacement::Term(Term::var(&y))).is_err());
        // Bound occurrences are left alone.
        let same = substitute(&body, &y, &Replacement::Term(Term::var(&x))).unwrap();
        assert_eq!(same, body);
    }

    #[test]
    fn alpha_equivalence() {
        let (x, y, z) = (Var::primary("x"), Var::primary("y"), Var::primary("z"));
        let a = Formula::forall(x.clone(), Formula::eq(Term::var(&x), Term::var(&z)));
        let b = Formula::forall(y.clone(), Formula::eq(Term::var(&y), Term::var(&z)));
        let c = Formula::forall(y.clone(), Formula::eq(Term::var(&y), Term::var(&y)));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&a, &c));
        let d = Formula::forall(z.clone(), Formula::eq(Term::var(&z), Term::var(&z)));
        assert!(alpha_eq(&c, &d));
        assert!(!alpha_eq(&a, &Formula::forall(Var::secondary("x"), Formula::top())));
    }

    #[test]
    fn fresh_names_avoid_everything_seen() {
        let x = Var::primary("v");
        let mut fresh = Fresh::new();
        fresh.avoid(&x);
        let v = fresh.var("v", VarSort::Primary);
        assert_ne!(v, x);
        assert_eq!(fresh.var("v", VarSort::Secondary), Var::secondary("v"));
    }
}
