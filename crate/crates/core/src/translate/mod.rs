//! Translation of formulas into the membership fragment: no `upd` atoms,
//! no `[X]` modalities, and every atom over variables only.
//!
//! The pipeline is flatten → eliminate `upd` → flatten → eliminate `[X]`,
//! repeated until a pass changes nothing. `upd` atoms produced by the seq
//! axiom sit under a modality and are eliminated in the same recursive
//! pass, so in practice the loop runs once; each expansion step strictly
//! shrinks the rule inside the atom it replaces, which bounds the
//! recursion.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Signature, Sort};
use crate::syntax::derived::{con_uset, empty_set, fresh_ind, location_vars, member};
use crate::syntax::ops::sort_of;
use crate::syntax::{Formula, Fresh, Rule, Term, Var, VarSort};

/// Size figures of one `to_lin` call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TranslationStats {
    pub input_nodes: usize,
    pub output_nodes: usize,
    pub iterations: usize,
}

/// Right-hand side of the update-set axiom matching the form of `r`, with
/// `upd` atoms for the immediate subrules left in place.
pub fn upd_rhs(sig: &Signature, r: &Rule, x: &Var, fresh: &mut Fresh) -> Formula {
    match r {
        Rule::Update { func, args, value } => {
            let (xs, y) = location_vars(sig, *func, fresh);
            let mut only = Vec::with_capacity(xs.len() + 1);
            for (v, t) in xs.iter().zip(args) {
                only.push(Formula::eq(Term::var(v), t.clone()));
            }
            only.push(Formula::eq(Term::var(&y), value.clone()));
            let mut all = xs.clone();
            all.push(y.clone());
            let this = Formula::forall_many(all, Formula::implies(member(x, *func, &xs, &y), Formula::conj(only)));
            let others = sig.dynamic_funcs().filter(|g| g != func).collect::<Vec<_>>();
            let mut parts = alloc::vec![
                Formula::In1 { set: x.clone(), func: *func, args: args.clone(), value: value.clone() },
                this,
            ];
            for g in others {
                let (gs, z) = location_vars(sig, g, fresh);
                let body = Formula::not(member(x, g, &gs, &z));
                let mut all = gs;
                all.push(z);
                parts.push(Formula::forall_many(all, body));
            }
            Formula::conj(parts)
        }
        Rule::If { guard, body } => Formula::or(
            Formula::and(guard.clone(), Formula::upd((**body).clone(), x.clone())),
            Formula::and(Formula::not(guard.clone()), empty_set(sig, x, fresh)),
        ),
        Rule::Forall { var, guard, body } => {
            let big = fresh.var("XX", VarSort::TaggedSet);
            let y = fresh.var("Y", VarSort::Set);
            let tag = Term::var(var);
            let slices = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
                let (ys, v) = location_vars(sig, f, fresh);
                let body = Formula::iff(
                    member(&y, f, &ys, &v),
                    Formula::In2 { set: big.clone(), func: f, args: vars(&ys), value: Term::var(&v), tag: tag.clone() },
                );
                let mut all = ys;
                all.push(v);
                Formula::forall_many(all, body)
            }));
            let empty_slice = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
                let (ys, v) = location_vars(sig, f, fresh);
                let body = Formula::not(Formula::In2 {
                    set: big.clone(),
                    func: f,
                    args: vars(&ys),
                    value: Term::var(&v),
                    tag: tag.clone(),
                });
                let mut all = ys;
                all.push(v);
                Formula::forall_many(all, body)
            }));
            let per_witness = Formula::forall(
                var.clone(),
                Formula::and(
                    Formula::implies(
                        guard.clone(),
                        Formula::exists(y.clone(), Formula::and(Formula::upd((**body).clone(), y.clone()), slices)),
                    ),
                    Formula::implies(Formula::not(guard.clone()), empty_slice),
                ),
            );
            let union = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
                let (xs, v) = location_vars(sig, f, fresh);
                let t = fresh.var("x", VarSort::Primary);
                let body = Formula::iff(
                    member(x, f, &xs, &v),
                    Formula::exists(
                        t.clone(),
                        Formula::In2 { set: big.clone(), func: f, args: vars(&xs), value: Term::var(&v), tag: Term::var(&t) },
                    ),
                );
                let mut all = xs;
                all.push(v);
                Formula::forall_many(all, body)
            }));
            Formula::exists(big.clone(), Formula::and(per_witness, union))
        }
        Rule::Par(a, b) => {
            let y1 = fresh.var("Y", VarSort::Set);
            let y2 = fresh.var("Y", VarSort::Set);
            let union = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
                let (xs, v) = location_vars(sig, f, fresh);
                let body = Formula::iff(
                    member(x, f, &xs, &v),
                    Formula::or(member(&y1, f, &xs, &v), member(&y2, f, &xs, &v)),
                );
                let mut all = xs;
                all.push(v);
                Formula::forall_many(all, body)
            }));
            Formula::exists_many(
                alloc::vec![y1.clone(), y2.clone()],
                Formula::conj([Formula::upd((**a).clone(), y1), Formula::upd((**b).clone(), y2), union]),
            )
        }
        Rule::Choose { var, guard, body } => {
            Formula::exists(var.clone(), Formula::and(guard.clone(), Formula::upd((**body).clone(), x.clone())))
        }
        Rule::Seq(a, b) => {
            let y1 = fresh.var("Y", VarSort::Set);
            let y2 = fresh.var("Y", VarSort::Set);
            let failed = Formula::and(Formula::upd((**a).clone(), x.clone()), Formula::not(con_uset(sig, x, fresh)));
            let merge = Formula::conj(sig.dynamic_funcs().collect::<Vec<_>>().into_iter().map(|f| {
                let (xs, v) = location_vars(sig, f, fresh);
                let z = fresh_ind(fresh, sig.decl(f).kind.value_sort());
                let untouched = Formula::forall(z.clone(), Formula::not(member(&y2, f, &xs, &z)));
                let body = Formula::iff(
                    member(x, f, &xs, &v),
                    Formula::or(Formula::and(member(&y1, f, &xs, &v), untouched), member(&y2, f, &xs, &v)),
                );
                let mut all = xs;
                all.push(v);
                Formula::forall_many(all, body)
            }));
            let staged = Formula::exists_many(
                alloc::vec![y1.clone(), y2.clone()],
                Formula::conj([
                    Formula::upd((**a).clone(), y1.clone()),
                    con_uset(sig, &y1, fresh),
                    Formula::modal(y1.clone(), Formula::upd((**b).clone(), y2.clone())),
                    merge,
                ]),
            );
            Formula::or(failed, staged)
        }
    }
}

fn vars(vs: &[Var]) -> Vec<Term> {
    vs.iter().map(Term::var).collect()
}

/// The translation state: a signature and a supply of fresh names that
/// avoids every variable of the input.
pub struct Translator<'a> {
    sig: &'a Signature,
    fresh: Fresh,
    max_nodes: usize,
}

impl<'a> Translator<'a> {
    pub fn new(sig: &'a Signature, input: &Formula, max_nodes: usize) -> Self {
        let mut fresh = Fresh::for_signature(sig);
        fresh.avoid_formula(input);
        Translator { sig, fresh, max_nodes }
    }

    fn guard_size(&self, f: &Formula) -> Result<()> {
        if f.size() > self.max_nodes {
            return Err(Error::ResourceLimit(format!("translation exceeded {} formula nodes", self.max_nodes)));
        }
        Ok(())
    }

    fn bind(&mut self, t: &Term) -> Result<Var> {
        Ok(match sort_of(t, self.sig)? {
            Sort::Primary => self.fresh.var("x", VarSort::Primary),
            Sort::Secondary => self.fresh.var("y", VarSort::Secondary),
        })
    }

    /// Replaces each compound term in `ts` by a fresh variable, recording
    /// the defining equations.
    fn name_all(&mut self, ts: &[Term], defs: &mut Vec<(Var, Term)>) -> Result<Vec<Term>> {
        ts.iter().map(|t| self.name(t, defs)).collect()
    }

    fn name(&mut self, t: &Term, defs: &mut Vec<(Var, Term)>) -> Result<Term> {
        if let Term::Var(_) = t {
            return Ok(t.clone());
        }
        let v = self.bind(t)?;
        defs.push((v.clone(), t.clone()));
        Ok(Term::var(&v))
    }

    /// ∃v̄(t̄ = v̄ ∧ atom), each defining equation flattened in turn.
    fn close(&mut self, defs: Vec<(Var, Term)>, atom: Formula) -> Result<Formula> {
        if defs.is_empty() {
            return Ok(atom);
        }
        let mut parts = Vec::with_capacity(defs.len() + 1);
        let mut bound = Vec::with_capacity(defs.len());
        for (v, t) in defs {
            parts.push(self.flatten_eq(&t, &Term::var(&v))?);
            bound.push(v);
        }
        parts.push(atom);
        Ok(Formula::exists_many(bound, Formula::conj(parts)))
    }

    fn flatten_eq(&mut self, s: &Term, t: &Term) -> Result<Formula> {
        match (s, t) {
            (Term::Var(_), Term::Var(_)) => Ok(Formula::eq(s.clone(), t.clone())),
            (Term::App(..), Term::Var(_)) => self.flatten_app(s, t),
            (Term::Var(_), Term::App(..)) => self.flatten_app(t, s),
            (Term::App(..), Term::App(..)) => {
                let v = self.bind(s)?;
                let left = self.flatten_app(s, &Term::var(&v))?;
                let right = self.flatten_app(t, &Term::var(&v))?;
                Ok(Formula::exists(v, Formula::and(left, right)))
            }
        }
    }

    /// `f(s̄) = y` with y a variable.
    fn flatten_app(&mut self, app: &Term, y: &Term) -> Result<Formula> {
        let Term::App(f, args) = app else { unreachable!("flatten_app on a variable") };
        let mut defs = Vec::new();
        let named = self.name_all(args, &mut defs)?;
        self.close(defs, Formula::eq(Term::App(*f, named), y.clone()))
    }

    /// Rewrites every atom into one of the canonical variable-only shapes.
    pub fn flatten_atoms(&mut self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Eq(s, t) => self.flatten_eq(s, t)?,
            Formula::Not(a) => Formula::not(self.flatten_atoms(a)?),
            Formula::And(a, b) => Formula::and(self.flatten_atoms(a)?, self.flatten_atoms(b)?),
            Formula::Forall(v, a) => Formula::forall(v.clone(), self.flatten_atoms(a)?),
            Formula::Modal(x, a) => Formula::modal(x.clone(), self.flatten_atoms(a)?),
            Formula::Upd(..) => f.clone(),
            Formula::In1 { set, func, args, value } => {
                let mut defs = Vec::new();
                let args = self.name_all(args, &mut defs)?;
                let value = self.name(value, &mut defs)?;
                self.close(defs, Formula::In1 { set: set.clone(), func: *func, args, value })?
            }
            Formula::In2 { set, func, args, value, tag } => {
                let mut defs = Vec::new();
                let args = self.name_all(args, &mut defs)?;
                let value = self.name(value, &mut defs)?;
                let tag = self.name(tag, &mut defs)?;
                self.close(defs, Formula::In2 { set: set.clone(), func: *func, args, value, tag })?
            }
        })
    }

    /// Replaces every `upd(r,X)`, including those under modalities, by the
    /// fully expanded right-hand side of its update-set axiom.
    pub fn eliminate_upd(&mut self, f: &Formula) -> Result<Formula> {
        let out = match f {
            Formula::Eq(..) | Formula::In1 { .. } | Formula::In2 { .. } => f.clone(),
            Formula::Not(a) => Formula::not(self.eliminate_upd(a)?),
            Formula::And(a, b) => Formula::and(self.eliminate_upd(a)?, self.eliminate_upd(b)?),
            Formula::Forall(v, a) => Formula::forall(v.clone(), self.eliminate_upd(a)?),
            Formula::Modal(x, a) => Formula::modal(x.clone(), self.eliminate_upd(a)?),
            Formula::Upd(r, x) => {
                let rhs = upd_rhs(self.sig, r, x, &mut self.fresh);
                self.eliminate_upd(&rhs)?
            }
        };
        self.guard_size(&out)?;
        Ok(out)
    }

    /// Removes `[X]` from a flattened, `upd`-free formula, innermost first.
    pub fn eliminate_modal(&mut self, f: &Formula) -> Result<Formula> {
        let out = match f {
            Formula::Eq(..) | Formula::In1 { .. } | Formula::In2 { .. } => f.clone(),
            Formula::Not(a) => Formula::not(self.eliminate_modal(a)?),
            Formula::And(a, b) => Formula::and(self.eliminate_modal(a)?, self.eliminate_modal(b)?),
            Formula::Forall(v, a) => Formula::forall(v.clone(), self.eliminate_modal(a)?),
            Formula::Upd(..) => return Err(Error::Sort("modal elimination needs an upd-free formula".into())),
            Formula::Modal(x, a) => {
                let inner = self.eliminate_modal(a)?;
                let pushed = self.push_modal(x, &inner)?;
                Formula::implies(con_uset(self.sig, x, &mut self.fresh), pushed)
            }
        };
        self.guard_size(&out)?;
        Ok(out)
    }

    /// [X]φ for modality-free flattened φ, assuming conUSet(X). The
    /// structural clauses each repeat the guard `conUSet(X) →`; under the
    /// single guard placed by the caller those copies are redundant.
    fn push_modal(&mut self, x: &Var, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Eq(Term::App(func, args), y) if self.sig.decl(*func).dynamic => {
                let z = fresh_ind(&mut self.fresh, self.sig.decl(*func).kind.value_sort());
                let new_value = Formula::In1 { set: x.clone(), func: *func, args: args.clone(), value: y.clone() };
                let untouched = Formula::forall(
                    z.clone(),
                    Formula::not(Formula::In1 { set: x.clone(), func: *func, args: args.clone(), value: Term::var(&z) }),
                );
                Formula::or(new_value, Formula::and(untouched, f.clone()))
            }
            Formula::Eq(..) | Formula::In1 { .. } | Formula::In2 { .. } => f.clone(),
            Formula::Not(a) => Formula::not(self.push_modal(x, a)?),
            Formula::And(a, b) => Formula::and(self.push_modal(x, a)?, self.push_modal(x, b)?),
            Formula::Forall(v, a) => {
                if v == x {
                    let w = self.fresh.var(&v.name, v.sort);
                    let renamed = crate::syntax::ops::rename(a, v, &w);
                    Formula::forall(w.clone(), self.push_modal(x, &renamed)?)
                } else {
                    Formula::forall(v.clone(), self.push_modal(x, a)?)
                }
            }
            Formula::Upd(..) | Formula::Modal(..) => {
                return Err(Error::Sort("modal elimination reached an upd atom or nested modality".into()))
            }
        })
    }
}

/// φ without `upd` and `[X]`, all atoms flattened.
pub fn to_lin(f: &Formula, sig: &Signature, max_nodes: usize) -> Result<(Formula, TranslationStats)> {
    let mut t = Translator::new(sig, f, max_nodes);
    let mut stats = TranslationStats { input_nodes: f.size(), ..TranslationStats::default() };
    let mut cur = f.clone();
    loop {
        stats.iterations += 1;
        let a = t.flatten_atoms(&cur)?;
        let b = t.eliminate_upd(&a)?;
        let c = t.flatten_atoms(&b)?;
        let d = t.eliminate_modal(&c)?;
        if d == cur {
            break;
        }
        cur = d;
        if crate::syntax::is_membership_fragment(&cur) && crate::syntax::is_flat(&cur) {
            break;
        }
    }
    stats.output_nodes = cur.size();
    Ok((cur, stats))
}

/// Standalone flattening with its own fresh-name supply.
pub fn flatten_atoms(f: &Formula, sig: &Signature) -> Result<Formula> {
    Translator::new(sig, f, usize::MAX).flatten_atoms(f)
}

pub fn eliminate_upd(f: &Formula, sig: &Signature, max_nodes: usize) -> Result<Formula> {
    Translator::new(sig, f, max_nodes).eliminate_upd(f)
}

/// Requires `f` flattened and `upd`-free.
pub fn eliminate_modal(f: &Formula, sig: &Signature, max_nodes: usize) -> Result<Formula> {
    Translator::new(sig, f, max_nodes).eliminate_modal(f)
}
