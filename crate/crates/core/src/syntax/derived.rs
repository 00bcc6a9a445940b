//! Defining formulas of the derived predicates and modalities.

use alloc::vec::Vec;

use super::ast::{Formula, Rule, Term, Var, VarSort};
use super::ops::Fresh;
use crate::model::{Func, Signature, Sort};

/// Fresh variables for the argument tuple and value positions of `f`.
pub fn location_vars(sig: &Signature, f: Func, fresh: &mut Fresh) -> (Vec<Var>, Var) {
    let d = sig.decl(f);
    let args = (0..d.arity).map(|_| fresh_ind(fresh, d.kind.arg_sort())).collect();
    (args, fresh_ind(fresh, d.kind.value_sort()))
}

pub fn fresh_ind(fresh: &mut Fresh, sort: Sort) -> Var {
    match sort {
        Sort::Primary => fresh.var("x", VarSort::Primary),
        Sort::Secondary => fresh.var("y", VarSort::Secondary),
    }
}

fn vars(vs: &[Var]) -> Vec<Term> {
    vs.iter().map(Term::var).collect()
}

pub fn member(set: &Var, f: Func, args: &[Var], value: &Var) -> Formula {
    Formula::In1 { set: set.clone(), func: f, args: vars(args), value: Term::var(value) }
}

/// conUSet(X): no location is updated to two values.
pub fn con_uset(sig: &Signature, x: &Var, fresh: &mut Fresh) -> Formula {
    Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
        let (args, y) = location_vars(sig, f, fresh);
        let z = fresh_ind(fresh, sig.decl(f).kind.value_sort());
        let body = Formula::implies(
            Formula::and(member(x, f, &args, &y), member(x, f, &args, &z)),
            Formula::eq(Term::var(&y), Term::var(&z)),
        );
        let mut all = args;
        all.push(y);
        all.push(z);
        Formula::forall_many(all, body)
    }))
}

/// ⋀_f ∀x̄y ¬X(f,x̄,y): X is the empty update set.
pub fn empty_set(sig: &Signature, x: &Var, fresh: &mut Fresh) -> Formula {
    Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
        let (args, y) = location_vars(sig, f, fresh);
        let body = Formula::not(member(x, f, &args, &y));
        let mut all = args;
        all.push(y);
        Formula::forall_many(all, body)
    }))
}

/// con(r,X) ≡ upd(r,X) ∧ conUSet(X)
pub fn con(sig: &Signature, r: &Rule, x: &Var, fresh: &mut Fresh) -> Formula {
    Formula::and(Formula::upd(r.clone(), x.clone()), con_uset(sig, x, fresh))
}

/// wcon(r) ≡ ∃X con(r,X)
pub fn wcon(sig: &Signature, r: &Rule, fresh: &mut Fresh) -> Formula {
    let x = fresh.var("X", VarSort::Set);
    Formula::exists(x.clone(), con(sig, r, &x, fresh))
}

/// scon(r) ≡ ∀X(upd(r,X) → con(r,X))
pub fn scon(sig: &Signature, r: &Rule, fresh: &mut Fresh) -> Formula {
    let x = fresh.var("X", VarSort::Set);
    Formula::forall(x.clone(), Formula::implies(Formula::upd(r.clone(), x.clone()), con(sig, r, &x, fresh)))
}

/// joinable(r1,r2): some update sets of the two rules agree on shared
/// locations.
pub fn joinable(sig: &Signature, r1: &Rule, r2: &Rule, fresh: &mut Fresh) -> Formula {
    let x1 = fresh.var("X", VarSort::Set);
    let x2 = fresh.var("X", VarSort::Set);
    let agree = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
        let (args, y) = location_vars(sig, f, fresh);
        let z = fresh_ind(fresh, sig.decl(f).kind.value_sort());
        let body = Formula::implies(
            Formula::and(member(&x1, f, &args, &y), member(&x2, f, &args, &z)),
            Formula::eq(Term::var(&y), Term::var(&z)),
        );
        let mut all = args;
        all.push(y);
        all.push(z);
        Formula::forall_many(all, body)
    }));
    Formula::exists_many(
        alloc::vec![x1.clone(), x2.clone()],
        Formula::conj([Formula::upd(r1.clone(), x1), Formula::upd(r2.clone(), x2), agree]),
    )
}

/// [r]φ ≡ ∀X(upd(r,X) → [X]φ) with X not free in φ.
pub fn box_rule(r: &Rule, phi: Formula, fresh: &mut Fresh) -> Formula {
    fresh.avoid_formula(&phi);
    let x = fresh.var("X", VarSort::Set);
    Formula::forall(x.clone(), Formula::implies(Formula::upd(r.clone(), x.clone()), Formula::modal(x, phi)))
}

/// ⟨r⟩φ ≡ ∃X(upd(r,X) ∧ [X]φ) with X not free in φ.
pub fn diamond_rule(r: &Rule, phi: Formula, fresh: &mut Fresh) -> Formula {
    fresh.avoid_formula(&phi);
    let x = fresh.var("X", VarSort::Set);
    Formula::exists(x.clone(), Formula::and(Formula::upd(r.clone(), x.clone()), Formula::modal(x, phi)))
}
