//! Update-set families Δ(r,S,ζ), the successor relation and runs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Elem, Family, State, TaggedUpdateSet, Update, UpdateSet};
use crate::syntax::ops::var_text;
use crate::syntax::{Formula, Machine, Rule, StateSet, Term, Var};

/// Resource caps shared by the engine and the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest update-set family any rule may produce.
    pub max_family: usize,
    /// Largest single update set.
    pub max_set: usize,
    /// Search nodes allowed for one top-level formula evaluation.
    pub max_pred_enum: u64,
    /// Largest formula the translation may produce.
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_family: 100_000, max_set: 10_000, max_pred_enum: 1_000_000, max_nodes: 1_000_000 }
    }
}

/// Values of free variables of all four sorts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    ind: BTreeMap<Var, Elem>,
    sets: BTreeMap<Var, UpdateSet>,
    tagged: BTreeMap<Var, TaggedUpdateSet>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn bind(&mut self, v: Var, e: Elem) {
        self.ind.insert(v, e);
    }

    pub fn bind_set(&mut self, v: Var, u: UpdateSet) {
        self.sets.insert(v, u);
    }

    pub fn bind_tagged(&mut self, v: Var, u: TaggedUpdateSet) {
        self.tagged.insert(v, u);
    }

    /// ζ[x ↦ a]
    pub fn with(&self, v: Var, e: Elem) -> Valuation {
        let mut out = self.clone();
        out.bind(v, e);
        out
    }

    pub fn get(&self, v: &Var) -> Option<Elem> {
        self.ind.get(v).copied()
    }

    pub fn get_set(&self, v: &Var) -> Option<&UpdateSet> {
        self.sets.get(v)
    }

    pub fn get_tagged(&self, v: &Var) -> Option<&TaggedUpdateSet> {
        self.tagged.get(v)
    }

    pub fn individuals(&self) -> impl Iterator<Item = (&Var, &Elem)> {
        self.ind.iter()
    }

    pub fn set_bindings(&self) -> impl Iterator<Item = (&Var, &UpdateSet)> {
        self.sets.iter()
    }

    pub fn tagged_bindings(&self) -> impl Iterator<Item = (&Var, &TaggedUpdateSet)> {
        self.tagged.iter()
    }

    pub(crate) fn stack(&self) -> Vec<(Var, Elem)> {
        self.ind.iter().map(|(v, &e)| (v.clone(), e)).collect()
    }
}

/// Individual bindings as a stack; later entries shadow earlier ones.
pub(crate) type Env = Vec<(Var, Elem)>;

pub(crate) fn lookup(env: &Env, v: &Var) -> Result<Elem> {
    env.iter()
        .rev()
        .find(|(w, _)| w == v)
        .map(|&(_, e)| e)
        .ok_or_else(|| Error::UnboundVariable(var_text(v)))
}

pub(crate) fn term_value(t: &Term, s: &State, env: &Env) -> Result<Elem> {
    match t {
        Term::Var(v) => lookup(env, v),
        Term::App(f, args) => {
            if args.is_empty() {
                return Ok(s.get(*f, &[]));
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(term_value(a, s, env)?);
            }
            Ok(s.get(*f, &vals))
        }
    }
}

/// First-order truth value; guards never mention predicate variables.
pub(crate) fn guard_value(f: &Formula, s: &State, env: &mut Env) -> Result<bool> {
    match f {
        Formula::Eq(a, b) => Ok(term_value(a, s, env)? == term_value(b, s, env)?),
        Formula::Not(a) => Ok(!guard_value(a, s, env)?),
        Formula::And(a, b) => Ok(guard_value(a, s, env)? && guard_value(b, s, env)?),
        Formula::Forall(v, body) => {
            let sort = v
                .sort
                .individual()
                .ok_or_else(|| Error::Sort("predicate quantifier in a guard".into()))?;
            for e in s.universe().carrier(sort) {
                env.push((v.clone(), e));
                let r = guard_value(body, s, env);
                env.pop();
                if !r? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::Sort("guards must be first-order formulas".into())),
    }
}

/// val_{S,ζ}(t)
pub fn eval_term(t: &Term, s: &State, val: &Valuation) -> Result<Elem> {
    term_value(t, s, &val.stack())
}

/// [[φ]]_{S,ζ} for first-order φ.
pub fn eval_guard(f: &Formula, s: &State, val: &Valuation) -> Result<bool> {
    guard_value(f, s, &mut val.stack())
}

fn check_family(fam: &Family, limits: &Limits) -> Result<()> {
    if fam.len() > limits.max_family {
        return Err(Error::ResourceLimit(format!(
            "update-set family exceeds {} members",
            limits.max_family
        )));
    }
    Ok(())
}

fn check_set(u: &UpdateSet, limits: &Limits) -> Result<()> {
    if u.len() > limits.max_set {
        return Err(Error::ResourceLimit(format!("update set exceeds {} updates", limits.max_set)));
    }
    Ok(())
}

/// {Δ1 ∪ Δ2 | Δ1 ∈ a, Δ2 ∈ b}
fn cross(a: &Family, b: &Family, limits: &Limits) -> Result<Family> {
    let mut out = Family::new();
    for x in a.iter() {
        for y in b.iter() {
            let u = x.union(y);
            check_set(&u, limits)?;
            out.insert(u);
            check_family(&out, limits)?;
        }
    }
    Ok(out)
}

pub(crate) fn delta_in(r: &Rule, s: &State, env: &mut Env, limits: &Limits) -> Result<Family> {
    let fam = match r {
        Rule::Update { func, args, value } => {
            let mut a = Vec::with_capacity(args.len());
            for t in args {
                a.push(term_value(t, s, env)?);
            }
            let b = term_value(value, s, env)?;
            let mut fam = Family::new();
            fam.insert(UpdateSet::singleton(Update::new(*func, a, b)));
            fam
        }
        Rule::If { guard, body } => {
            if guard_value(guard, s, env)? {
                delta_in(body, s, env, limits)?
            } else {
                Family::skip()
            }
        }
        Rule::Forall { var, guard, body } => {
            let mut acc = Family::skip();
            let sort = var.sort.individual().ok_or_else(|| Error::Sort("bad forall binder".into()))?;
            for e in s.universe().carrier(sort) {
                env.push((var.clone(), e));
                let part = match guard_value(guard, s, env) {
                    Ok(true) => delta_in(body, s, env, limits).map(Some),
                    Ok(false) => Ok(None),
                    Err(err) => Err(err),
                };
                env.pop();
                if let Some(part) = part? {
                    acc = cross(&acc, &part, limits)?;
                }
            }
            acc
        }
        Rule::Choose { var, guard, body } => {
            let mut acc = Family::new();
            let sort = var.sort.individual().ok_or_else(|| Error::Sort("bad choose binder".into()))?;
            for e in s.universe().carrier(sort) {
                env.push((var.clone(), e));
                let part = match guard_value(guard, s, env) {
                    Ok(true) => delta_in(body, s, env, limits).map(Some),
                    Ok(false) => Ok(None),
                    Err(err) => Err(err),
                };
                env.pop();
                if let Some(part) = part? {
                    acc.extend(part);
                    check_family(&acc, limits)?;
                }
            }
            acc
        }
        Rule::Par(a, b) => {
            let fa = delta_in(a, s, env, limits)?;
            let fb = delta_in(b, s, env, limits)?;
            cross(&fa, &fb, limits)?
        }
        Rule::Seq(a, b) => {
            let mut out = Family::new();
            for d1 in delta_in(a, s, env, limits)? {
                if !d1.is_consistent() {
                    out.insert(d1);
                } else {
                    let s1 = s.apply(&d1)?;
                    for d2 in delta_in(b, &s1, env, limits)? {
                        let u = d1.seq_merge(&d2);
                        check_set(&u, limits)?;
                        out.insert(u);
                    }
                }
                check_family(&out, limits)?;
            }
            out
        }
    };
    check_family(&fam, limits)?;
    Ok(fam)
}

/// Δ(r,S,ζ)
pub fn delta(r: &Rule, s: &State, val: &Valuation, limits: &Limits) -> Result<Family> {
    delta_in(r, s, &mut val.stack(), limits)
}

/// States reachable in one step: S + Δ for each consistent Δ ∈ Δ(r,S).
pub fn successors(r: &Rule, s: &State, limits: &Limits) -> Result<BTreeSet<State>> {
    let mut out = BTreeSet::new();
    for d in delta(r, s, &Valuation::new(), limits)?.iter() {
        if d.is_consistent() {
            out.insert(s.apply(d)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    All,
    Sample(u64),
}

/// Outcome of exploring runs from one initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// Each reachable final state with a shortest run ending in it.
    pub terminal: BTreeMap<State, Vec<State>>,
    /// Non-final states without successors, each with the run reaching it.
    pub stuck: BTreeMap<State, Vec<State>>,
    /// True when `max_steps` cut off unexplored states.
    pub non_terminating: bool,
    /// Distinct states visited.
    pub explored: usize,
}

impl StateSet {
    pub fn contains(&self, s: &State, limits: &Limits) -> Result<bool> {
        match self {
            StateSet::All => Ok(true),
            StateSet::Nothing => Ok(false),
            StateSet::Formula(f) => crate::logic::eval(f, s, &Valuation::new(), limits),
            StateSet::Listed(states) => Ok(states.contains(s)),
        }
    }
}

/// Checks that a state interprets exactly the machine's signature.
pub fn check_state_signature(m: &Machine, s: &State) -> Result<()> {
    if **s.signature() != *m.signature {
        return Err(Error::State(
            "state and machine declare different functions (names, kinds and order must agree)".into(),
        ));
    }
    Ok(())
}

fn trace(parents: &BTreeMap<State, Option<State>>, end: &State) -> Vec<State> {
    let mut out = alloc::vec![end.clone()];
    let mut cur = end;
    while let Some(Some(p)) = parents.get(cur) {
        out.push(p.clone());
        cur = p;
    }
    out.reverse();
    out
}

/// Runs S0,…,Sn with Sn final and no final state strictly in between.
/// `All` explores breadth-first with global deduplication; `Sample` follows
/// one uniformly chosen successor per step.
pub fn run(m: &Machine, s0: &State, max_steps: usize, mode: RunMode, limits: &Limits) -> Result<RunReport> {
    check_state_signature(m, s0)?;
    if !m.initial.contains(s0, limits)? {
        return Err(Error::State("start state is not an initial state of the machine".into()));
    }
    let mut report =
        RunReport { terminal: BTreeMap::new(), stuck: BTreeMap::new(), non_terminating: false, explored: 1 };
    if m.final_states.contains(s0, limits)? {
        report.terminal.insert(s0.clone(), alloc::vec![s0.clone()]);
        return Ok(report);
    }
    match mode {
        RunMode::All => {
            let mut parents: BTreeMap<State, Option<State>> = BTreeMap::new();
            parents.insert(s0.clone(), None);
            let mut frontier = alloc::vec![s0.clone()];
            let mut depth = 0;
            while !frontier.is_empty() {
                if depth == max_steps {
                    report.non_terminating = true;
                    break;
                }
                depth += 1;
                let mut next = Vec::new();
                for s in &frontier {
                    let succ = successors(&m.rule, s, limits)?;
                    if succ.is_empty() {
                        report.stuck.insert(s.clone(), trace(&parents, s));
                        continue;
                    }
                    for t in succ {
                        if parents.contains_key(&t) {
                            continue;
                        }
                        parents.insert(t.clone(), Some(s.clone()));
                        if m.final_states.contains(&t, limits)? {
                            report.terminal.insert(t.clone(), trace(&parents, &t));
                        } else {
                            next.push(t);
                        }
                    }
                }
                frontier = next;
            }
            report.explored = parents.len();
        }
        RunMode::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut path = alloc::vec![s0.clone()];
            loop {
                if path.len() > max_steps {
                    report.non_terminating = true;
                    break;
                }
                let cur = path.last().unwrap().clone();
                let succ: Vec<State> = successors(&m.rule, &cur, limits)?.into_iter().collect();
                if succ.is_empty() {
                    report.stuck.insert(cur, path.clone());
                    break;
                }
                let next = succ[rng.gen_range(0..succ.len())].clone();
                path.push(next.clone());
                if m.final_states.contains(&next, limits)? {
                    report.terminal.insert(next, path.clone());
                    break;
                }
            }
            report.explored = path.len();
        }
    }
    Ok(report)
}
