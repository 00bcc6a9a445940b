//! Seeded random signatures, states, rules, formulas and valuations.
//!
//! Everything is drawn from one ChaCha8 stream, so a seed reproduces a
//! sample exactly.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Elem, Func, FuncKind, Signature, Sort, State, TaggedUpdate, TaggedUpdateSet, Universe, Update, UpdateSet};
use crate::semantics::Valuation;
use crate::syntax::{Formula, FreeVars, Rule, Term, Var, VarSort};

/// Size bounds for sampled vocabularies and worlds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    /// Largest |B1|, counting `true` and `false`.
    pub max_primary: usize,
    pub max_secondary: usize,
    pub max_dynamic: usize,
    pub max_static: usize,
    pub max_arity: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_primary: 4, max_secondary: 4, max_dynamic: 2, max_static: 2, max_arity: 1 }
    }
}

/// Variables a sampled formula or rule may mention.
///
/// `sets` may appear under a modality; `blind_sets` are bound by unguarded
/// predicate quantifiers and only occur in membership and `upd` atoms, since
/// a modality over a partially known set forces full enumeration.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub ind: Vec<Var>,
    pub sets: Vec<Var>,
    pub blind_sets: Vec<Var>,
    pub tagged: Vec<Var>,
}

impl Scope {
    pub fn with_ind(&self, v: Var) -> Scope {
        let mut s = self.clone();
        s.ind.push(v);
        s
    }
}

/// Options for rule sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleShape {
    /// Never emit `choose`.
    pub deterministic: bool,
}

pub struct Sampler {
    rng: ChaCha8Rng,
    pub shape: Shape,
    next_var: usize,
}

impl Sampler {
    pub fn new(seed: u64, shape: Shape) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), shape, next_var: 0 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(&mut self.rng).expect("non-empty choice").clone()
    }

    fn kind(&mut self) -> FuncKind {
        [FuncKind::Primary, FuncKind::Secondary, FuncKind::Bridge][self.below(3)]
    }

    /// Dynamic functions `f0, f1, ..`, static functions `s0, ..` and the
    /// static secondary constant `k`, which keeps B2 terms always available.
    pub fn signature(&mut self) -> Signature {
        let mut sig = Signature::new();
        let dynamic = self.rng.gen_range(1..=self.shape.max_dynamic.max(1));
        for i in 0..dynamic {
            let kind = self.kind();
            let arity = self.rng.gen_range(0..=self.shape.max_arity);
            sig.declare(&format!("f{i}"), arity, kind, true).expect("fresh name");
        }
        let statics = self.rng.gen_range(0..=self.shape.max_static);
        for i in 0..statics {
            let kind = self.kind();
            let arity = self.rng.gen_range(0..=self.shape.max_arity);
            sig.declare(&format!("s{i}"), arity, kind, false).expect("fresh name");
        }
        sig.declare("k", 0, FuncKind::Bridge, false).expect("fresh name");
        sig
    }

    pub fn universe(&mut self) -> Universe {
        let n1 = self.rng.gen_range(2..=self.shape.max_primary.max(2));
        let n2 = self.rng.gen_range(1..=self.shape.max_secondary.max(1));
        let mut primary: Vec<String> = vec!["true".into(), "false".into()];
        primary.extend(["a", "b", "c", "d", "e"].iter().take(n1 - 2).map(|s| String::from(*s)));
        let secondary: Vec<String> = (0..n2).map(|i| format!("{i}")).collect();
        Universe::new(&primary, &secondary).expect("distinct atoms")
    }

    pub fn elem(&mut self, univ: &Universe, sort: Sort) -> Elem {
        let i = self.below(univ.carrier_len(sort));
        univ.from_local(sort, i)
    }

    /// A state with a random table for every non-reserved function.
    pub fn state(&mut self, sig: &Arc<Signature>, univ: &Arc<Universe>) -> State {
        let defaults: Vec<Elem> = sig.funcs().map(|f| self.elem(univ, sig.decl(f).kind.value_sort())).collect();
        let mut s = State::new(sig.clone(), univ.clone(), &defaults).expect("well-kinded defaults");
        for f in sig.funcs().filter(|&f| !sig.is_builtin(f)) {
            let d = sig.decl(f).clone();
            for args in tuples(univ, d.kind.arg_sort(), d.arity) {
                if self.coin(0.5) {
                    let v = self.elem(univ, d.kind.value_sort());
                    s.set(f, &args, v).expect("well-kinded entry");
                }
            }
        }
        s
    }

    /// A fresh signature, universe and state.
    pub fn world(&mut self) -> State {
        let sig = Arc::new(self.signature());
        let univ = Arc::new(self.universe());
        self.state(&sig, &univ)
    }

    pub fn fresh(&mut self, sort: VarSort) -> Var {
        self.next_var += 1;
        let n = self.next_var;
        match sort {
            VarSort::Primary => Var::primary(&format!("x{n}")),
            VarSort::Secondary => Var::secondary(&format!("y{n}")),
            VarSort::Set => Var::set(&format!("X{n}")),
            VarSort::TaggedSet => Var::tagged(&format!("T{n}")),
        }
    }

    pub fn fresh_ind(&mut self) -> Var {
        let sort = if self.coin(0.6) { VarSort::Primary } else { VarSort::Secondary };
        self.fresh(sort)
    }

    fn funcs_into(&self, sig: &Signature, sort: Sort, static_only: bool, nullary: bool) -> Vec<Func> {
        sig.funcs()
            .filter(|&f| {
                let d = sig.decl(f);
                d.kind.value_sort() == sort && !(static_only && d.dynamic) && (!nullary || d.arity == 0)
            })
            .collect()
    }

    /// A term of `sort`. With `static_only`, dynamic functions are avoided.
    pub fn term(&mut self, sig: &Signature, sort: Sort, scope: &Scope, depth: usize, static_only: bool) -> Term {
        let vars: Vec<Var> = scope.ind.iter().filter(|v| v.sort.individual() == Some(sort)).cloned().collect();
        let funcs = self.funcs_into(sig, sort, static_only, depth == 0);
        if !vars.is_empty() && (funcs.is_empty() || self.coin(0.5)) {
            return Term::Var(self.pick(&vars));
        }
        let f = self.pick(&funcs);
        let d = sig.decl(f).clone();
        let args = (0..d.arity).map(|_| self.term(sig, d.kind.arg_sort(), scope, depth - 1, static_only)).collect();
        Term::App(f, args)
    }

    fn sort(&mut self) -> Sort {
        if self.coin(0.6) {
            Sort::Primary
        } else {
            Sort::Secondary
        }
    }

    /// A first-order formula, usable as a guard.
    pub fn guard(&mut self, sig: &Signature, scope: &Scope, depth: usize, static_only: bool) -> Formula {
        if depth == 0 || self.coin(0.3) {
            let sort = self.sort();
            let a = self.term(sig, sort, scope, 1, static_only);
            let b = self.term(sig, sort, scope, 1, static_only);
            return Formula::eq(a, b);
        }
        match self.below(5) {
            0 => Formula::not(self.guard(sig, scope, depth - 1, static_only)),
            1 => Formula::and(self.guard(sig, scope, depth - 1, static_only), self.guard(sig, scope, depth - 1, static_only)),
            2 => Formula::or(self.guard(sig, scope, depth - 1, static_only), self.guard(sig, scope, depth - 1, static_only)),
            3 => {
                let v = self.fresh_ind();
                Formula::exists(v.clone(), self.guard(sig, &scope.with_ind(v), depth - 1, static_only))
            }
            _ => {
                let v = self.fresh_ind();
                Formula::forall(v.clone(), self.guard(sig, &scope.with_ind(v), depth - 1, static_only))
            }
        }
    }

    pub fn update_rule(&mut self, sig: &Signature, scope: &Scope) -> Rule {
        let dynamic: Vec<Func> = sig.dynamic_funcs().collect();
        let f = self.pick(&dynamic);
        let d = sig.decl(f).clone();
        let args = (0..d.arity).map(|_| self.term(sig, d.kind.arg_sort(), scope, 1, false)).collect();
        let value = self.term(sig, d.kind.value_sort(), scope, 1, false);
        Rule::update(f, args, value)
    }

    /// A rule of nesting depth at most `depth` whose free variables come from
    /// `scope.ind`.
    pub fn rule(&mut self, sig: &Signature, scope: &Scope, depth: usize, shape: RuleShape) -> Rule {
        if depth == 0 || self.coin(0.2) {
            return self.update_rule(sig, scope);
        }
        let forms = if shape.deterministic { 4 } else { 5 };
        let form = self.below(forms);
        self.rule_form(sig, scope, depth, shape, form)
    }

    /// Form 0 `if`, 1 `forall`, 2 `par`, 3 `seq`, 4 `choose`; subrules are
    /// at most `depth - 1` deep.
    pub fn rule_form(&mut self, sig: &Signature, scope: &Scope, depth: usize, shape: RuleShape, form: usize) -> Rule {
        let sub = depth.saturating_sub(1);
        match form {
            0 => {
                let g = self.guard(sig, scope, 1, false);
                Rule::if_then(g, self.rule(sig, scope, sub, shape))
            }
            1 => {
                let v = self.fresh(VarSort::Primary);
                let inner = scope.with_ind(v.clone());
                let g = self.guard(sig, &inner, 1, false);
                Rule::forall(v, g, self.rule(sig, &inner, sub, shape))
            }
            2 => Rule::par(self.rule(sig, scope, sub, shape), self.rule(sig, scope, sub, shape)),
            3 => Rule::seq(self.rule(sig, scope, sub, shape), self.rule(sig, scope, sub, shape)),
            _ => {
                let v = self.fresh_ind();
                let inner = scope.with_ind(v.clone());
                let g = self.guard(sig, &inner, 1, false);
                Rule::choose(v, g, self.rule(sig, &inner, sub, shape))
            }
        }
    }

    fn membership(&mut self, sig: &Signature, scope: &Scope, set: Var) -> Formula {
        let dynamic: Vec<Func> = sig.dynamic_funcs().collect();
        let f = self.pick(&dynamic);
        let d = sig.decl(f).clone();
        let args = (0..d.arity).map(|_| self.term(sig, d.kind.arg_sort(), scope, 1, false)).collect();
        let value = self.term(sig, d.kind.value_sort(), scope, 1, false);
        if set.sort == VarSort::TaggedSet {
            let tag = self.term(sig, Sort::Primary, scope, 1, false);
            Formula::In2 { set, func: f, args, value, tag }
        } else {
            Formula::In1 { set, func: f, args, value }
        }
    }

    fn atom(&mut self, sig: &Signature, scope: &Scope, static_only: bool) -> Formula {
        let sets: Vec<Var> = scope.sets.iter().chain(&scope.blind_sets).cloned().collect();
        if static_only || sets.is_empty() && scope.tagged.is_empty() {
            return self.guard(sig, scope, 0, static_only);
        }
        match self.below(4) {
            0 => self.guard(sig, scope, 0, false),
            1 if !scope.tagged.is_empty() => {
                let t = self.pick(&scope.tagged);
                self.membership(sig, scope, t)
            }
            2 if !sets.is_empty() => {
                let x = self.pick(&sets);
                let r = self.rule(sig, scope, 1, RuleShape::default());
                Formula::upd(r, x)
            }
            _ if !sets.is_empty() => {
                let x = self.pick(&sets);
                self.membership(sig, scope, x)
            }
            _ => self.guard(sig, scope, 0, false),
        }
    }

    /// A formula of the full logic. Rules inside are at most two deep.
    /// With `static_only` the result mentions no dynamic function, so no
    /// membership, `upd` or rule modality can occur.
    pub fn formula(&mut self, sig: &Signature, scope: &Scope, depth: usize, static_only: bool) -> Formula {
        if depth == 0 || self.coin(0.15) {
            return self.atom(sig, scope, static_only);
        }
        let d = depth - 1;
        match self.below(if static_only { 6 } else { 10 }) {
            0 => Formula::not(self.formula(sig, scope, d, static_only)),
            1 => Formula::and(self.formula(sig, scope, d, static_only), self.formula(sig, scope, d, static_only)),
            2 => Formula::implies(self.formula(sig, scope, d, static_only), self.formula(sig, scope, d, static_only)),
            3 => {
                let v = self.fresh_ind();
                Formula::forall(v.clone(), self.formula(sig, &scope.with_ind(v), d, static_only))
            }
            4 => {
                let v = self.fresh_ind();
                Formula::exists(v.clone(), self.formula(sig, &scope.with_ind(v), d, static_only))
            }
            5 if !scope.sets.is_empty() => {
                let x = self.pick(&scope.sets);
                Formula::modal(x, self.formula(sig, scope, d, static_only))
            }
            5 => Formula::or(self.formula(sig, scope, d, static_only), self.formula(sig, scope, d, static_only)),
            6 | 7 => {
                let r = self.rule(sig, scope, 2.min(d + 1), RuleShape::default());
                let phi = self.formula(sig, scope, d, false);
                let diamond = self.coin(0.5);
                self.rule_modality(r, phi, diamond)
            }
            8 => {
                let x = self.fresh(VarSort::Set);
                let mut inner = scope.clone();
                inner.blind_sets.push(x.clone());
                let body = self.formula(sig, &inner, d, false);
                if self.coin(0.5) {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
            _ => {
                let x = self.fresh(VarSort::TaggedSet);
                let mut inner = scope.clone();
                inner.tagged.push(x.clone());
                let body = self.formula(sig, &inner, d.min(1), false);
                Formula::exists(x, body)
            }
        }
    }

    /// `[r]φ` or `⟨r⟩φ` over a new set variable.
    pub fn rule_modality(&mut self, r: Rule, phi: Formula, diamond: bool) -> Formula {
        let x = self.fresh(VarSort::Set);
        if diamond {
            Formula::exists(x.clone(), Formula::and(Formula::upd(r, x.clone()), Formula::modal(x, phi)))
        } else {
            Formula::forall(x.clone(), Formula::implies(Formula::upd(r, x.clone()), Formula::modal(x, phi)))
        }
    }

    /// At most three random well-kinded updates; one time in four a clash is
    /// planted so the set is inconsistent whenever a carrier allows it.
    pub fn update_set(&mut self, s: &State) -> UpdateSet {
        let sig = s.signature().clone();
        let univ = s.universe().clone();
        let dynamic: Vec<Func> = sig.dynamic_funcs().collect();
        let mut u = UpdateSet::new();
        let n = self.below(4);
        for _ in 0..n {
            let f = self.pick(&dynamic);
            let d = sig.decl(f);
            let args: Vec<Elem> = (0..d.arity).map(|_| self.elem(&univ, d.kind.arg_sort())).collect();
            let value = self.elem(&univ, d.kind.value_sort());
            u.insert(Update::new(f, args, value));
        }
        if self.coin(0.25) {
            let f = self.pick(&dynamic);
            let d = sig.decl(f);
            let args: Vec<Elem> = (0..d.arity).map(|_| self.elem(&univ, d.kind.arg_sort())).collect();
            let sort = d.kind.value_sort();
            if univ.carrier_len(sort) > 1 {
                let a = self.below(univ.carrier_len(sort));
                let b = (a + 1 + self.below(univ.carrier_len(sort) - 1)) % univ.carrier_len(sort);
                u.insert(Update::new(f, args.clone(), univ.from_local(sort, a)));
                u.insert(Update::new(f, args, univ.from_local(sort, b)));
            }
        }
        u
    }

    pub fn tagged_set(&mut self, s: &State) -> TaggedUpdateSet {
        let univ = s.universe().clone();
        let mut out = TaggedUpdateSet::new();
        for _ in 0..self.below(3) {
            let tag = self.elem(&univ, Sort::Primary);
            for update in self.update_set(s).iter() {
                out.insert(TaggedUpdate { update: update.clone(), tag });
            }
        }
        out
    }

    /// Random values for every free variable of `f`.
    pub fn valuation_for(&mut self, f: &Formula, s: &State) -> Valuation {
        let mut val = Valuation::new();
        for v in f.free_variables() {
            self.bind(&mut val, v, s);
        }
        val
    }

    pub fn bind(&mut self, val: &mut Valuation, v: Var, s: &State) {
        match v.sort {
            VarSort::Primary | VarSort::Secondary => {
                let sort = v.sort.individual().expect("individual sort");
                let e = self.elem(s.universe(), sort);
                val.bind(v, e);
            }
            VarSort::Set => {
                let u = self.update_set(s);
                val.bind_set(v, u);
            }
            VarSort::TaggedSet => {
                let u = self.tagged_set(s);
                val.bind_tagged(v, u);
            }
        }
    }
}

/// All argument tuples of length `arity` over the carrier of `sort`.
pub fn tuples(univ: &Universe, sort: Sort, arity: usize) -> Vec<Vec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                univ.carrier(sort).map(move |e| {
                    let mut t = prefix.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}
