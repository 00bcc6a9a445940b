//! Evaluation of formulas of the logic on finite states.
//!
//! Quantifiers over predicate variables range over all finite sets of
//! well-kinded update triples (or tagged quadruples). Instead of
//! materialising the power set, the body is evaluated three-valuedly under a
//! partial assignment of the bound variable; the search branches only on
//! membership bits the body actually reads. Bodies of the shape
//! `¬(… upd(r,X) …)` are decided by iterating Δ(r) directly.

pub mod derived;
pub mod lemmas;
pub mod validate;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{Elem, Func, Signature, Sort, State, TaggedUpdateSet, Universe, Update, UpdateSet};
use crate::semantics::{delta_in, lookup, term_value, Env, Limits, Valuation};
use crate::syntax::ops::{var_text, FreeVars};
use crate::syntax::{Formula, Rule, Term, Var, VarSort};

pub use derived::{con, con_uset, joinable, rules_equivalent, scon, wcon};

/// Evaluation switches. `modal_on_inconsistent` is the truth value of
/// `[X]φ` when X is inconsistent; only mutation tests change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub modal_on_inconsistent: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { modal_on_inconsistent: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    fn of(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::True => Tri::False,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

#[derive(Debug, Clone)]
struct FuncRegion {
    func: Func,
    offset: usize,
    arity: usize,
    arg_sort: Sort,
    val_sort: Sort,
    n_arg: usize,
    n_val: usize,
}

/// Index space of well-kinded update triples of a state shape.
#[derive(Debug, Clone)]
pub struct PredDomain {
    regions: Vec<FuncRegion>,
    by_func: Vec<Option<usize>>,
    size: usize,
    tags: usize,
}

impl PredDomain {
    pub fn new(sig: &Signature, univ: &Universe) -> PredDomain {
        let mut regions = Vec::new();
        let mut by_func = alloc::vec![None; sig.len()];
        let mut offset = 0;
        for f in sig.dynamic_funcs() {
            let d = sig.decl(f);
            let n_arg = univ.carrier_len(d.kind.arg_sort());
            let n_val = univ.carrier_len(d.kind.value_sort());
            let size = n_arg.pow(d.arity as u32) * n_val;
            by_func[f.0 as usize] = Some(regions.len());
            regions.push(FuncRegion {
                func: f,
                offset,
                arity: d.arity,
                arg_sort: d.kind.arg_sort(),
                val_sort: d.kind.value_sort(),
                n_arg,
                n_val,
            });
            offset += size;
        }
        PredDomain { regions, by_func, size: offset, tags: univ.carrier_len(Sort::Primary) }
    }

    /// Number of well-kinded triples.
    pub fn triples(&self) -> usize {
        self.size
    }

    /// Number of well-kinded tagged quadruples.
    pub fn quadruples(&self) -> usize {
        self.size * self.tags
    }

    fn index(&self, univ: &Universe, f: Func, args: &[Elem], value: Elem) -> Option<usize> {
        let r = &self.regions[(*self.by_func.get(f.0 as usize)?)?];
        if args.len() != r.arity || univ.sort_of(value) != r.val_sort {
            return None;
        }
        let mut idx = 0;
        for &a in args {
            if univ.sort_of(a) != r.arg_sort {
                return None;
            }
            idx = idx * r.n_arg + univ.local(a);
        }
        Some(r.offset + idx * r.n_val + univ.local(value))
    }

    fn tagged_index(&self, univ: &Universe, f: Func, args: &[Elem], value: Elem, tag: Elem) -> Option<usize> {
        if univ.sort_of(tag) != Sort::Primary {
            return None;
        }
        Some(self.index(univ, f, args, value)? * self.tags + univ.local(tag))
    }

    fn region_of(&self, i: usize) -> &FuncRegion {
        let k = self.regions.partition_point(|r| r.offset <= i) - 1;
        &self.regions[k]
    }

    /// Identifier of the location of triple `i` (equal iff same location).
    fn location_key(&self, i: usize) -> usize {
        let r = self.region_of(i);
        r.offset + (i - r.offset) / r.n_val * r.n_val
    }

    fn decode(&self, univ: &Universe, i: usize) -> Update {
        let r = self.region_of(i);
        let rel = i - r.offset;
        let value = univ.from_local(r.val_sort, rel % r.n_val);
        let mut rest = rel / r.n_val;
        let mut args = alloc::vec![Elem(0); r.arity];
        for slot in args.iter_mut().rev() {
            *slot = univ.from_local(r.arg_sort, rest % r.n_arg);
            rest /= r.n_arg;
        }
        Update::new(r.func, args, value)
    }

    fn set_bits(&self, univ: &Universe, u: &UpdateSet) -> Result<Vec<usize>> {
        u.iter()
            .map(|x| {
                self.index(univ, x.loc.func, &x.loc.args, x.value)
                    .ok_or_else(|| Error::State("update set contains an ill-kinded update".into()))
            })
            .collect()
    }
}

/// Partial assignment of a predicate variable.
#[derive(Debug, Clone)]
struct Slot {
    var: Var,
    known: FixedBitSet,
    value: FixedBitSet,
}

impl Slot {
    fn full(var: Var, size: usize, ones: &[usize]) -> Slot {
        let mut known = FixedBitSet::with_capacity(size);
        known.insert_range(..);
        let mut value = FixedBitSet::with_capacity(size);
        for &i in ones {
            value.insert(i);
        }
        Slot { var, known, value }
    }

    fn unknown(var: Var, size: usize) -> Slot {
        Slot { var, known: FixedBitSet::with_capacity(size), value: FixedBitSet::with_capacity(size) }
    }

    fn first_unknown(&self) -> Option<usize> {
        self.known.zeroes().next()
    }

    fn is_complete(&self) -> bool {
        self.first_unknown().is_none()
    }
}

struct Ctx {
    ind: Env,
    sets: Vec<Slot>,
    /// Triples applied by enclosing modalities, one list per modality;
    /// identifies the current state for memoisation.
    applied: Vec<Vec<usize>>,
}

impl Ctx {
    fn slot(&self, v: &Var) -> Result<usize> {
        self.sets
            .iter()
            .rposition(|s| &s.var == v)
            .ok_or_else(|| Error::UnboundVariable(var_text(v)))
    }
}

/// Formula evaluator bound to one state shape.
pub struct Evaluator<'a> {
    limits: &'a Limits,
    opts: EvalOptions,
    dom: PredDomain,
    first_read: Cell<Option<(usize, usize)>>,
    nodes: Cell<u64>,
    /// Outcomes of predicate-quantifier searches, each with the outer
    /// membership bits the search read. A search is a deterministic function
    /// of the quantifier, the current state, its free individuals and the
    /// bits it reads, so an entry applies wherever those reads agree.
    memo: RefCell<BTreeMap<MemoKey, Vec<MemoEntry>>>,
    /// Reads stored in `memo`; the table is dropped when it passes
    /// `MEMO_BUDGET`.
    memo_weight: Cell<usize>,
    /// Open searches, innermost last, collecting outer reads.
    frames: RefCell<Vec<Frame>>,
    free_ind: RefCell<BTreeMap<usize, Rc<Vec<Var>>>>,
}

/// Roughly 100 MB of stored reads.
const MEMO_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct MemoKey {
    node: usize,
    applied: Vec<Vec<usize>>,
    ind: Vec<Elem>,
}

/// Slot, bit and what was seen there: `None` if unknown.
type Read = (usize, usize, Option<bool>);

#[derive(Debug, Clone)]
struct MemoEntry {
    reads: Vec<Read>,
    tri: Tri,
    blocker: Option<(usize, usize)>,
}

#[derive(Debug)]
struct Frame {
    /// Slot of the variable being searched; reads below it are outer.
    slot: usize,
    reads: Vec<Read>,
}

impl<'a> Evaluator<'a> {
    pub fn new(state: &State, limits: &'a Limits, opts: EvalOptions) -> Evaluator<'a> {
        Evaluator {
            limits,
            opts,
            dom: PredDomain::new(state.signature(), state.universe()),
            first_read: Cell::new(None),
            nodes: Cell::new(0),
            memo: RefCell::new(BTreeMap::new()),
            memo_weight: Cell::new(0),
            frames: RefCell::new(Vec::new()),
            free_ind: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn domain(&self) -> &PredDomain {
        &self.dom
    }

    /// Search nodes used by the last call to [`Evaluator::eval`].
    pub fn nodes(&self) -> u64 {
        self.nodes.get()
    }

    /// [[φ]]_{S,ζ}; every free variable of φ must be bound by ζ.
    pub fn eval(&self, f: &Formula, s: &State, val: &Valuation) -> Result<bool> {
        let univ = s.universe();
        for v in f.free_variables() {
            let bound = match v.sort {
                VarSort::Primary | VarSort::Secondary => val.get(&v).is_some(),
                VarSort::Set => val.get_set(&v).is_some(),
                VarSort::TaggedSet => val.get_tagged(&v).is_some(),
            };
            if !bound {
                return Err(Error::UnboundVariable(var_text(&v)));
            }
        }
        let mut ctx = Ctx { ind: val.stack(), sets: Vec::new(), applied: Vec::new() };
        for (v, u) in val.set_bindings() {
            let bits = self.dom.set_bits(univ, u)?;
            ctx.sets.push(Slot::full(v.clone(), self.dom.triples(), &bits));
        }
        for (v, u) in val.tagged_bindings() {
            ctx.sets.push(Slot::full(v.clone(), self.dom.quadruples(), &self.tagged_bits(univ, u)?));
        }
        self.nodes.set(0);
        self.memo.borrow_mut().clear();
        self.memo_weight.set(0);
        self.frames.borrow_mut().clear();
        self.free_ind.borrow_mut().clear();
        match self.eval3(f, s, &mut ctx)? {
            Tri::True => Ok(true),
            Tri::False => Ok(false),
            Tri::Unknown => Err(Error::State("evaluation left a predicate variable undecided".into())),
        }
    }

    fn tagged_bits(&self, univ: &Universe, u: &TaggedUpdateSet) -> Result<Vec<usize>> {
        u.iter()
            .map(|t| {
                self.dom
                    .tagged_index(univ, t.update.loc.func, &t.update.loc.args, t.update.value, t.tag)
                    .ok_or_else(|| Error::State("tagged update set contains an ill-kinded quadruple".into()))
            })
            .collect()
    }

    fn read(&self, slot: usize, bit: usize) {
        if self.first_read.get().is_none() {
            self.first_read.set(Some((slot, bit)));
        }
    }

    fn bit(&self, ctx: &Ctx, slot: usize, i: Option<usize>) -> Tri {
        let Some(i) = i else { return Tri::False };
        let sl = &ctx.sets[slot];
        if sl.known.contains(i) {
            let v = sl.value.contains(i);
            self.note(slot, i, Some(v));
            Tri::of(v)
        } else {
            self.note(slot, i, None);
            self.read(slot, i);
            Tri::Unknown
        }
    }

    /// Records a read for the innermost open search, if it is outer to it.
    fn note(&self, slot: usize, bit: usize, seen: Option<bool>) {
        if let Some(top) = self.frames.borrow_mut().last_mut() {
            if slot < top.slot {
                top.reads.push((slot, bit, seen));
            }
        }
    }

    /// Records a dependency on every bit of a slot.
    fn note_slot(&self, ctx: &Ctx, slot: usize) {
        let outer = matches!(self.frames.borrow().last(), Some(top) if slot < top.slot);
        if outer {
            let sl = &ctx.sets[slot];
            for i in 0..sl.known.len() {
                self.note(slot, i, sl.known.contains(i).then(|| sl.value.contains(i)));
            }
        }
    }

    fn values(&self, ts: &[Term], s: &State, ctx: &Ctx) -> Result<Vec<Elem>> {
        ts.iter().map(|t| term_value(t, s, &ctx.ind)).collect()
    }

    fn eval3(&self, f: &Formula, s: &State, ctx: &mut Ctx) -> Result<Tri> {
        match f {
            Formula::Eq(a, b) => Ok(Tri::of(term_value(a, s, &ctx.ind)? == term_value(b, s, &ctx.ind)?)),
            Formula::Not(a) => Ok(self.eval3(a, s, ctx)?.not()),
            Formula::And(a, b) => {
                let l = self.eval3(a, s, ctx)?;
                if l == Tri::False {
                    return Ok(Tri::False);
                }
                Ok(l.and(self.eval3(b, s, ctx)?))
            }
            Formula::Forall(v, body) => match v.sort {
                VarSort::Primary | VarSort::Secondary => {
                    let sort = v.sort.individual().unwrap();
                    let mut acc = Tri::True;
                    for e in s.universe().carrier(sort) {
                        ctx.ind.push((v.clone(), e));
                        let r = self.eval3(body, s, ctx);
                        ctx.ind.pop();
                        acc = acc.and(r?);
                        if acc == Tri::False {
                            break;
                        }
                    }
                    Ok(acc)
                }
                VarSort::Set | VarSort::TaggedSet => self.forall_pred(v, body, s, ctx),
            },
            Formula::In1 { set, func, args, value } => {
                let slot = ctx.slot(set)?;
                let i = self.dom.index(s.universe(), *func, &self.values(args, s, ctx)?, term_value(value, s, &ctx.ind)?);
                Ok(self.bit(ctx, slot, i))
            }
            Formula::In2 { set, func, args, value, tag } => {
                let slot = ctx.slot(set)?;
                let i = self.dom.tagged_index(
                    s.universe(),
                    *func,
                    &self.values(args, s, ctx)?,
                    term_value(value, s, &ctx.ind)?,
                    term_value(tag, s, &ctx.ind)?,
                );
                Ok(self.bit(ctx, slot, i))
            }
            Formula::Upd(r, x) => self.upd(r, x, s, ctx),
            Formula::Modal(x, body) => {
                let slot = ctx.slot(x)?;
                self.note_slot(ctx, slot);
                if !self.known_true_consistent(&ctx.sets[slot]) {
                    return Ok(Tri::of(self.opts.modal_on_inconsistent));
                }
                if let Some(i) = ctx.sets[slot].first_unknown() {
                    self.read(slot, i);
                    return Ok(Tri::Unknown);
                }
                let u: UpdateSet =
                    ctx.sets[slot].value.ones().map(|i| self.dom.decode(s.universe(), i)).collect();
                let next = s.apply(&u)?;
                ctx.applied.push(ctx.sets[slot].value.ones().collect());
                let res = self.eval3(body, &next, ctx);
                ctx.applied.pop();
                res
            }
        }
    }

    fn known_true_consistent(&self, slot: &Slot) -> bool {
        let mut prev = None;
        for i in slot.known.intersection(&slot.value) {
            let key = self.dom.location_key(i);
            if prev == Some(key) {
                return false;
            }
            prev = Some(key);
        }
        true
    }

    fn upd(&self, r: &Rule, x: &Var, s: &State, ctx: &mut Ctx) -> Result<Tri> {
        let slot = ctx.slot(x)?;
        self.note_slot(ctx, slot);
        let fam = delta_in(r, s, &mut ctx.ind, self.limits)?;
        let univ = s.universe();
        let sl = &ctx.sets[slot];
        let complete = sl.is_complete();
        let mut possible = false;
        for d in fam.iter() {
            let mut bits = self.dom.set_bits(univ, d)?;
            bits.sort_unstable();
            let mismatch = bits.iter().any(|&i| sl.known.contains(i) && !sl.value.contains(i))
                || sl.known.intersection(&sl.value).any(|i| bits.binary_search(&i).is_err());
            if !mismatch {
                if complete {
                    return Ok(Tri::True);
                }
                possible = true;
            }
        }
        if !possible {
            return Ok(Tri::False);
        }
        self.read(slot, sl.first_unknown().expect("incomplete slot"));
        Ok(Tri::Unknown)
    }

    fn tick(&self) -> Result<()> {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        if n > self.limits.max_pred_enum {
            return Err(Error::ResourceLimit(format!(
                "predicate quantifier search exceeded {} nodes",
                self.limits.max_pred_enum
            )));
        }
        Ok(())
    }

    fn forall_pred(&self, v: &Var, body: &Formula, s: &State, ctx: &mut Ctx) -> Result<Tri> {
        if v.sort == VarSort::Set {
            if let Some(r) = upd_guard(body, v) {
                let fam = delta_in(r, s, &mut ctx.ind, self.limits)?;
                let mut acc = Tri::True;
                for d in fam.iter() {
                    self.tick()?;
                    let bits = self.dom.set_bits(s.universe(), d)?;
                    ctx.sets.push(Slot::full(v.clone(), self.dom.triples(), &bits));
                    let res = self.eval3(body, s, ctx);
                    ctx.sets.pop();
                    acc = acc.and(res?);
                    if acc == Tri::False {
                        break;
                    }
                }
                return Ok(acc);
            }
        }
        let key = self.memo_key(v, body, ctx)?;
        let k = ctx.sets.len();
        if let Some(hit) = self.lookup_memo(&key, ctx) {
            self.inherit(&hit.reads);
            if self.first_read.get().is_none() {
                self.first_read.set(hit.blocker);
            }
            return Ok(hit.tri);
        }
        let size = if v.sort == VarSort::Set { self.dom.triples() } else { self.dom.quadruples() };
        ctx.sets.push(Slot::unknown(v.clone(), size));
        self.frames.borrow_mut().push(Frame { slot: k, reads: Vec::new() });
        let saved = self.first_read.take();
        let res = self.search(body, s, ctx, k);
        ctx.sets.pop();
        let mut reads = self.frames.borrow_mut().pop().expect("open frame").reads;
        let (tri, blocker) = res?;
        reads.sort_unstable();
        reads.dedup();
        self.inherit(&reads);
        let weight = self.memo_weight.get() + reads.len() + 1;
        let mut memo = self.memo.borrow_mut();
        if weight > MEMO_BUDGET {
            memo.clear();
            self.memo_weight.set(0);
        } else {
            self.memo_weight.set(weight);
        }
        memo.entry(key).or_default().push(MemoEntry { reads, tri, blocker });
        drop(memo);
        self.first_read.set(saved.or(blocker));
        Ok(tri)
    }

    /// Passes a finished search's outer reads on to the enclosing search.
    fn inherit(&self, reads: &[Read]) {
        if let Some(top) = self.frames.borrow_mut().last_mut() {
            top.reads.extend(reads.iter().filter(|r| r.0 < top.slot).copied());
        }
    }

    fn lookup_memo(&self, key: &MemoKey, ctx: &Ctx) -> Option<MemoEntry> {
        let memo = self.memo.borrow();
        memo.get(key)?
            .iter()
            .find(|e| {
                e.reads.iter().all(|&(slot, bit, seen)| {
                    let sl = &ctx.sets[slot];
                    sl.known.contains(bit).then(|| sl.value.contains(bit)) == seen
                })
            })
            .cloned()
    }

    fn memo_key(&self, v: &Var, body: &Formula, ctx: &Ctx) -> Result<MemoKey> {
        let node = body as *const Formula as usize;
        let free = self
            .free_ind
            .borrow_mut()
            .entry(node)
            .or_insert_with(|| {
                Rc::new(body.free_variables().into_iter().filter(|w| w != v && w.sort.individual().is_some()).collect())
            })
            .clone();
        let ind = free.iter().map(|w| lookup(&ctx.ind, w)).collect::<Result<Vec<_>>>()?;
        Ok(MemoKey { node, applied: ctx.applied.clone(), ind })
    }

    /// Decides ∀V body where V is slot `k`. Returns the blocking read of an
    /// outer variable when the answer is unknown.
    fn search(&self, body: &Formula, s: &State, ctx: &mut Ctx, k: usize) -> Result<(Tri, Option<(usize, usize)>)> {
        self.tick()?;
        self.first_read.set(None);
        let r = self.eval3(body, s, ctx)?;
        if r != Tri::Unknown {
            return Ok((r, None));
        }
        match self.first_read.get() {
            Some((slot, bit)) if slot == k => {
                ctx.sets[k].known.insert(bit);
                ctx.sets[k].value.set(bit, false);
                let (r0, b0) = self.search(body, s, ctx, k)?;
                if r0 == Tri::False {
                    ctx.sets[k].known.set(bit, false);
                    return Ok((Tri::False, None));
                }
                ctx.sets[k].value.insert(bit);
                let res = self.search(body, s, ctx, k);
                ctx.sets[k].known.set(bit, false);
                ctx.sets[k].value.set(bit, false);
                let (r1, b1) = res?;
                let tri = r0.and(r1);
                Ok((tri, if tri == Tri::Unknown { b0.or(b1) } else { None }))
            }
            other => Ok((Tri::Unknown, other)),
        }
    }
}

/// If `body` is `¬ψ` where ψ implies `upd(r, x)` (with r's free variables
/// bound outside `body`), returns r: then `∀x body` only needs to be checked
/// for x ∈ Δ(r).
fn upd_guard<'f>(body: &'f Formula, x: &Var) -> Option<&'f Rule> {
    let Formula::Not(psi) = body else { return None };
    implied_upd(psi, x, &mut Vec::new())
}

fn implied_upd<'f>(f: &'f Formula, x: &Var, bound: &mut Vec<Var>) -> Option<&'f Rule> {
    match f {
        Formula::Upd(r, y) if y == x => {
            let free = r.free_variables();
            if bound.iter().any(|b| free.contains(b)) {
                None
            } else {
                Some(r)
            }
        }
        Formula::And(a, b) => implied_upd(a, x, bound).or_else(|| implied_upd(b, x, bound)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Not(a) => implied_upd(a, x, bound),
            // ∃v ψ = ¬∀v¬ψ
            Formula::Forall(v, nb) if v != x => match nb.as_ref() {
                Formula::Not(a) => {
                    bound.push(v.clone());
                    let r = implied_upd(a, x, bound);
                    bound.pop();
                    r
                }
                _ => None,
            },
            _ => None,
        },
        Formula::Forall(v, a) if v != x => {
            bound.push(v.clone());
            let r = implied_upd(a, x, bound);
            bound.pop();
            r
        }
        _ => None,
    }
}

/// [[φ]]_{S,ζ} with default options.
pub fn eval(f: &Formula, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    Evaluator::new(s, limits, EvalOptions::default()).eval(f, s, val)
}

pub fn eval_with(f: &Formula, s: &State, val: &Valuation, limits: &Limits, opts: EvalOptions) -> Result<bool> {
    Evaluator::new(s, limits, opts).eval(f, s, val)
}

/// [r]φ ≡ ∀X(upd(r,X) → [X]φ)
pub fn box_formula(r: &Rule, phi: &Formula, sig: &Signature) -> Formula {
    let mut fresh = crate::syntax::Fresh::for_signature(sig);
    crate::syntax::derived::box_rule(r, phi.clone(), &mut fresh)
}

/// ⟨r⟩φ ≡ ∃X(upd(r,X) ∧ [X]φ)
pub fn diamond_formula(r: &Rule, phi: &Formula, sig: &Signature) -> Formula {
    let mut fresh = crate::syntax::Fresh::for_signature(sig);
    crate::syntax::derived::diamond_rule(r, phi.clone(), &mut fresh)
}

#[cfg(test)]
mod tests;
