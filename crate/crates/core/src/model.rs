//! Metafinite states, locations, updates and update-set families.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// The two individual sorts: the finite primary part and the secondary part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Primary,
    Secondary,
}

/// An element of either carrier, indexed globally: primary atoms first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

/// Index of a function symbol in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Func(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncKind {
    /// B1ⁿ → B1
    Primary,
    /// B2ⁿ → B2
    Secondary,
    /// B1ⁿ → B2
    Bridge,
}

impl FuncKind {
    pub fn arg_sort(self) -> Sort {
        match self {
            FuncKind::Primary | FuncKind::Bridge => Sort::Primary,
            FuncKind::Secondary => Sort::Secondary,
        }
    }

    pub fn value_sort(self) -> Sort {
        match self {
            FuncKind::Primary => Sort::Primary,
            FuncKind::Secondary | FuncKind::Bridge => Sort::Secondary,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            FuncKind::Primary => "primary",
            FuncKind::Secondary => "secondary",
            FuncKind::Bridge => "bridge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: Arc<str>,
    pub arity: usize,
    pub kind: FuncKind,
    pub dynamic: bool,
}

/// Function symbols of all three groups. The reserved constants `true` and
/// `false` are always present as static nullary primary functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    decls: Vec<FuncDecl>,
    index: BTreeMap<Arc<str>, Func>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    pub const TRUE: Func = Func(0);
    pub const FALSE: Func = Func(1);

    pub fn new() -> Self {
        let mut sig = Signature { decls: Vec::new(), index: BTreeMap::new() };
        sig.declare("true", 0, FuncKind::Primary, false).unwrap();
        sig.declare("false", 0, FuncKind::Primary, false).unwrap();
        sig
    }

    pub fn declare(&mut self, name: &str, arity: usize, kind: FuncKind, dynamic: bool) -> Result<Func> {
        if self.index.contains_key(name) {
            return Err(Error::Sort(format!("function `{name}` declared twice")));
        }
        let f = Func(self.decls.len() as u32);
        let name: Arc<str> = Arc::from(name);
        self.index.insert(name.clone(), f);
        self.decls.push(FuncDecl { name, arity, kind, dynamic });
        Ok(f)
    }

    pub fn decl(&self, f: Func) -> &FuncDecl {
        &self.decls[f.0 as usize]
    }

    pub fn name(&self, f: Func) -> &str {
        &self.decls[f.0 as usize].name
    }

    pub fn lookup(&self, name: &str) -> Option<Func> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn is_builtin(&self, f: Func) -> bool {
        f.0 < 2
    }

    pub fn funcs(&self) -> impl Iterator<Item = Func> + '_ {
        (0..self.decls.len() as u32).map(Func)
    }

    /// 𝓕_dyn in declaration order.
    pub fn dynamic_funcs(&self) -> impl Iterator<Item = Func> + '_ {
        self.funcs().filter(|&f| self.decl(f).dynamic)
    }
}

/// The two disjoint carriers B1 and B2 with atom names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Vec<Arc<str>>,
    primary: u32,
    index: BTreeMap<Arc<str>, Elem>,
    true_elem: Elem,
    false_elem: Elem,
}

impl Universe {
    /// Builds carriers from atom names. B1 must contain `true` and `false`,
    /// B2 must be non-empty, and no atom may occur twice.
    pub fn new<S: AsRef<str>>(primary: &[S], secondary: &[S]) -> Result<Self> {
        if secondary.is_empty() {
            return Err(Error::State("secondary carrier is empty".into()));
        }
        let mut names = Vec::new();
        let mut index = BTreeMap::new();
        for a in primary.iter().chain(secondary) {
            let a: Arc<str> = Arc::from(a.as_ref());
            let e = Elem(names.len() as u32);
            if index.insert(a.clone(), e).is_some() {
                return Err(Error::State(format!("atom `{a}` listed twice")));
            }
            names.push(a);
        }
        let true_elem = *index
            .get("true")
            .filter(|e: &&Elem| (e.0 as usize) < primary.len())
            .ok_or_else(|| Error::State("primary carrier must contain `true`".into()))?;
        let false_elem = *index
            .get("false")
            .filter(|e: &&Elem| (e.0 as usize) < primary.len())
            .ok_or_else(|| Error::State("primary carrier must contain `false`".into()))?;
        Ok(Universe { names, primary: primary.len() as u32, index, true_elem, false_elem })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn carrier_len(&self, sort: Sort) -> usize {
        match sort {
            Sort::Primary => self.primary as usize,
            Sort::Secondary => self.names.len() - self.primary as usize,
        }
    }

    /// Elements of one carrier in canonical (declaration) order.
    pub fn carrier(&self, sort: Sort) -> impl Iterator<Item = Elem> + Clone {
        let r = match sort {
            Sort::Primary => 0..self.primary,
            Sort::Secondary => self.primary..self.names.len() as u32,
        };
        r.map(Elem)
    }

    pub fn sort_of(&self, e: Elem) -> Sort {
        if e.0 < self.primary {
            Sort::Primary
        } else {
            Sort::Secondary
        }
    }

    /// Position of `e` inside its own carrier.
    pub fn local(&self, e: Elem) -> usize {
        if e.0 < self.primary {
            e.0 as usize
        } else {
            (e.0 - self.primary) as usize
        }
    }

    /// Inverse of [`Universe::local`].
    pub fn from_local(&self, sort: Sort, i: usize) -> Elem {
        match sort {
            Sort::Primary => Elem(i as u32),
            Sort::Secondary => Elem(self.primary + i as u32),
        }
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Elem> {
        self.index.get(name).copied()
    }

    pub fn true_elem(&self) -> Elem {
        self.true_elem
    }

    pub fn false_elem(&self) -> Elem {
        self.false_elem
    }
}

/// A dynamic function applied to an argument tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub func: Func,
    pub args: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Update {
    pub loc: Location,
    pub value: Elem,
}

impl Update {
    pub fn new(func: Func, args: Vec<Elem>, value: Elem) -> Self {
        Update { loc: Location { func, args }, value }
    }
}

/// A finite set of updates, ordered by location then value.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpdateSet(BTreeSet<Update>);

impl UpdateSet {
    pub fn new() -> Self {
        UpdateSet(BTreeSet::new())
    }

    pub fn singleton(u: Update) -> Self {
        let mut s = BTreeSet::new();
        s.insert(u);
        UpdateSet(s)
    }

    pub fn insert(&mut self, u: Update) -> bool {
        self.0.insert(u)
    }

    pub fn contains(&self, u: &Update) -> bool {
        self.0.contains(u)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Update> + '_ {
        self.0.iter()
    }

    /// No two members share a location with distinct values.
    pub fn is_consistent(&self) -> bool {
        let mut prev: Option<&Location> = None;
        for u in &self.0 {
            if prev == Some(&u.loc) {
                return false;
            }
            prev = Some(&u.loc);
        }
        true
    }

    pub fn union(&self, other: &UpdateSet) -> UpdateSet {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        out.0.extend(small.0.iter().cloned());
        out
    }

    /// `self ⊘ later`: the updates of `later` plus those of `self` whose
    /// location `later` leaves untouched.
    pub fn seq_merge(&self, later: &UpdateSet) -> UpdateSet {
        let touched: BTreeSet<&Location> = later.0.iter().map(|u| &u.loc).collect();
        let mut out = later.clone();
        out.0.extend(self.0.iter().filter(|u| !touched.contains(&u.loc)).cloned());
        out
    }

    /// Locations updated by this set, deduplicated.
    pub fn locations(&self) -> BTreeSet<&Location> {
        self.0.iter().map(|u| &u.loc).collect()
    }

    pub fn value_at(&self, loc: &Location) -> Option<Elem> {
        self.0.iter().find(|u| &u.loc == loc).map(|u| u.value)
    }
}

impl FromIterator<Update> for UpdateSet {
    fn from_iter<I: IntoIterator<Item = Update>>(iter: I) -> Self {
        UpdateSet(iter.into_iter().collect())
    }
}

/// A set of update sets: the value of Δ(r,S,ζ).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family(BTreeSet<UpdateSet>);

impl Family {
    pub fn new() -> Self {
        Family(BTreeSet::new())
    }

    /// The family {∅}.
    pub fn skip() -> Self {
        let mut s = BTreeSet::new();
        s.insert(UpdateSet::new());
        Family(s)
    }

    pub fn insert(&mut self, u: UpdateSet) -> bool {
        self.0.insert(u)
    }

    pub fn contains(&self, u: &UpdateSet) -> bool {
        self.0.contains(u)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &UpdateSet> + '_ {
        self.0.iter()
    }

    pub fn extend(&mut self, other: Family) {
        self.0.extend(other.0);
    }
}

impl FromIterator<UpdateSet> for Family {
    fn from_iter<I: IntoIterator<Item = UpdateSet>>(iter: I) -> Self {
        Family(iter.into_iter().collect())
    }
}

impl IntoIterator for Family {
    type Item = UpdateSet;
    type IntoIter = alloc::collections::btree_set::IntoIter<UpdateSet>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// An update carrying a branch tag from B1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedUpdate {
    pub update: Update,
    pub tag: Elem,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaggedUpdateSet(BTreeSet<TaggedUpdate>);

impl TaggedUpdateSet {
    pub fn new() -> Self {
        TaggedUpdateSet(BTreeSet::new())
    }

    pub fn insert(&mut self, u: TaggedUpdate) -> bool {
        self.0.insert(u)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TaggedUpdate> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The updates carrying tag `tag`.
    pub fn project(&self, tag: Elem) -> UpdateSet {
        self.0.iter().filter(|t| t.tag == tag).map(|t| t.update.clone()).collect()
    }
}

impl FromIterator<TaggedUpdate> for TaggedUpdateSet {
    fn from_iter<I: IntoIterator<Item = TaggedUpdate>>(iter: I) -> Self {
        TaggedUpdateSet(iter.into_iter().collect())
    }
}

/// A metafinite state: carriers plus total function tables.
///
/// Equality and ordering are extensional over all function tables, which is
/// only meaningful between states sharing signature and carriers.
#[derive(Debug, Clone)]
pub struct State {
    sig: Arc<Signature>,
    univ: Arc<Universe>,
    tables: Vec<Arc<Vec<Elem>>>,
}

impl State {
    /// A state whose function `f` is constantly `defaults[f]`. The entries
    /// for the reserved constants are ignored.
    pub fn new(sig: Arc<Signature>, univ: Arc<Universe>, defaults: &[Elem]) -> Result<State> {
        if defaults.len() != sig.len() {
            return Err(Error::State(format!(
                "expected {} default values, got {}",
                sig.len(),
                defaults.len()
            )));
        }
        let mut tables = Vec::with_capacity(sig.len());
        for f in sig.funcs() {
            let d = sig.decl(f);
            let value = match f {
                Signature::TRUE => univ.true_elem(),
                Signature::FALSE => univ.false_elem(),
                _ => defaults[f.0 as usize],
            };
            if (value.0 as usize) >= univ.len() || univ.sort_of(value) != d.kind.value_sort() {
                return Err(Error::State(format!("default value of `{}` is in the wrong carrier", d.name)));
            }
            let n = univ.carrier_len(d.kind.arg_sort());
            let size = n
                .checked_pow(d.arity as u32)
                .filter(|&s| s <= 1 << 24)
                .ok_or_else(|| Error::ResourceLimit(format!("table of `{}` is too large", d.name)))?;
            tables.push(Arc::new(alloc::vec![value; size]));
        }
        Ok(State { sig, univ, tables })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.univ
    }

    fn index(&self, f: Func, args: &[Elem]) -> usize {
        let n = self.univ.carrier_len(self.sig.decl(f).kind.arg_sort());
        args.iter().fold(0, |acc, &a| acc * n + self.univ.local(a))
    }

    fn check_args(&self, f: Func, args: &[Elem]) -> Result<()> {
        let d = self.sig.decl(f);
        if args.len() != d.arity {
            return Err(Error::State(format!("`{}` expects {} arguments, got {}", d.name, d.arity, args.len())));
        }
        for &a in args {
            if (a.0 as usize) >= self.univ.len() || self.univ.sort_of(a) != d.kind.arg_sort() {
                return Err(Error::State(format!("argument of `{}` is in the wrong carrier", d.name)));
            }
        }
        Ok(())
    }

    /// Value of `f` at `args`. Arguments must be well-kinded.
    pub fn get(&self, f: Func, args: &[Elem]) -> Elem {
        debug_assert!(self.check_args(f, args).is_ok());
        self.tables[f.0 as usize][self.index(f, args)]
    }

    /// Overwrites one table entry (static functions included); used when
    /// building states from files.
    pub fn set(&mut self, f: Func, args: &[Elem], value: Elem) -> Result<()> {
        self.check_args(f, args)?;
        if self.sig.is_builtin(f) {
            return Err(Error::State(format!("`{}` is reserved", self.sig.name(f))));
        }
        let d = self.sig.decl(f);
        if (value.0 as usize) >= self.univ.len() || self.univ.sort_of(value) != d.kind.value_sort() {
            return Err(Error::State(format!("value of `{}` is in the wrong carrier", d.name)));
        }
        let i = self.index(f, args);
        Arc::make_mut(&mut self.tables[f.0 as usize])[i] = value;
        Ok(())
    }

    /// Rejects updates to static functions and ill-kinded triples.
    pub fn check_update(&self, u: &Update) -> Result<()> {
        let f = u.loc.func;
        if (f.0 as usize) >= self.sig.len() {
            return Err(Error::State("unknown function in update".into()));
        }
        let d = self.sig.decl(f);
        if !d.dynamic {
            return Err(Error::State(format!("update of static function `{}`", d.name)));
        }
        self.check_args(f, &u.loc.args)?;
        if (u.value.0 as usize) >= self.univ.len() || self.univ.sort_of(u.value) != d.kind.value_sort() {
            return Err(Error::State(format!("value for `{}` is in the wrong carrier", d.name)));
        }
        Ok(())
    }

    /// S + Δ. Fails with [`Error::InconsistentUpdateSet`] when Δ is
    /// inconsistent.
    pub fn apply(&self, delta: &UpdateSet) -> Result<State> {
        if !delta.is_consistent() {
            return Err(Error::InconsistentUpdateSet);
        }
        let mut next = self.clone();
        for u in delta.iter() {
            self.check_update(u)?;
            let i = self.index(u.loc.func, &u.loc.args);
            Arc::make_mut(&mut next.tables[u.loc.func.0 as usize])[i] = u.value;
        }
        Ok(next)
    }

    /// Every argument tuple of `f` in canonical order with its value.
    pub fn graph(&self, f: Func) -> impl Iterator<Item = (Vec<Elem>, Elem)> + '_ {
        let d = self.sig.decl(f);
        let sort = d.kind.arg_sort();
        let n = self.univ.carrier_len(sort);
        let arity = d.arity;
        let table = &self.tables[f.0 as usize];
        table.iter().enumerate().map(move |(i, &v)| {
            let mut args = alloc::vec![Elem(0); arity];
            let mut rest = i;
            for slot in args.iter_mut().rev() {
                *slot = self.univ.from_local(sort, rest % n);
                rest /= n;
            }
            (args, v)
        })
    }

    /// Most frequent value of `f`, ties broken by carrier order.
    pub fn most_common_value(&self, f: Func) -> Elem {
        let mut counts: BTreeMap<Elem, usize> = BTreeMap::new();
        for &v in self.tables[f.0 as usize].iter() {
            *counts.entry(v).or_default() += 1;
        }
        let best = counts.values().copied().max().unwrap_or(0);
        counts.into_iter().find(|&(_, c)| c == best).map(|(v, _)| v).unwrap_or(Elem(0))
    }

    /// Human-readable name of an element.
    pub fn atom(&self, e: Elem) -> &str {
        self.univ.name(e)
    }

    /// Short description of where two states differ, for diagnostics.
    pub fn diff(&self, other: &State) -> String {
        let mut out = String::new();
        for f in self.sig.funcs() {
            for ((args, a), (_, b)) in self.graph(f).zip(other.graph(f)) {
                if a != b {
                    let args: Vec<&str> = args.iter().map(|&e| self.atom(e)).collect();
                    out.push_str(&format!(
                        "{}({}): {} -> {}; ",
                        self.sig.name(f),
                        args.join(","),
                        self.atom(a),
                        other.atom(b)
                    ));
                }
            }
        }
        out
    }
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.tables.len() == other.tables.len()
            && self.tables.iter().zip(&other.tables).all(|(a, b)| Arc::ptr_eq(a, b) || a == b)
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.tables.iter().zip(&other.tables) {
            if Arc::ptr_eq(a, b) {
                continue;
            }
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.tables.len().cmp(&other.tables.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small() -> (State, Func, Func) {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1, FuncKind::Primary, true).unwrap();
        let g = sig.declare("g", 1, FuncKind::Bridge, true).unwrap();
        let univ = Universe::new(&["true", "false", "a", "b"], &["0", "1", "2"]).unwrap();
        let a = univ.lookup("a").unwrap();
        let zero = univ.lookup("0").unwrap();
        let s = State::new(Arc::new(sig), Arc::new(univ), &[a, a, a, zero]).unwrap();
        (s, f, g)
    }

    fn el(s: &State, n: &str) -> Elem {
        s.universe().lookup(n).unwrap()
    }

    #[test]
    fn consistency_examples() {
        let (s, f, g) = small();
        let (a, one, two) = (el(&s, "a"), el(&s, "1"), el(&s, "2"));
        assert!(UpdateSet::new().is_consistent());
        let clash: UpdateSet = [Update::new(f, vec![a], one), Update::new(f, vec![a], two)].into_iter().collect();
        assert!(!clash.is_consistent());
        let ok: UpdateSet = [Update::new(f, vec![a], one), Update::new(g, vec![a], two)].into_iter().collect();
        assert!(ok.is_consistent());
    }

    #[test]
    fn apply_examples() {
        let (s, f, g) = small();
        let (a, b, one, two) = (el(&s, "a"), el(&s, "b"), el(&s, "1"), el(&s, "2"));
        assert_eq!(s.apply(&UpdateSet::new()).unwrap(), s);
        let t = s.apply(&UpdateSet::singleton(Update::new(f, vec![a], b))).unwrap();
        assert_eq!(t.get(f, &[a]), b);
        assert_eq!(t.get(f, &[b]), s.get(f, &[b]));
        assert_eq!(t.get(g, &[a]), s.get(g, &[a]));
        let clash: UpdateSet = [Update::new(g, vec![a], one), Update::new(g, vec![a], two)].into_iter().collect();
        assert_eq!(s.apply(&clash), Err(Error::InconsistentUpdateSet));
    }

    #[test]
    fn apply_rejects_ill_kinded_updates() {
        let (s, f, g) = small();
        let (a, one) = (el(&s, "a"), el(&s, "1"));
        assert!(s.apply(&UpdateSet::singleton(Update::new(f, vec![a], one))).is_err());
        assert!(s.apply(&UpdateSet::singleton(Update::new(g, vec![one], one))).is_err());
        assert!(s.apply(&UpdateSet::singleton(Update::new(Signature::TRUE, vec![], a))).is_err());
    }

    #[test]
    fn seq_merge_examples() {
        let (s, f, g) = small();
        let (a, b, one, two) = (el(&s, "a"), el(&s, "b"), el(&s, "1"), el(&s, "2"));
        let d1 = UpdateSet::singleton(Update::new(g, vec![a], one));
        assert_eq!(d1.seq_merge(&UpdateSet::new()), d1);
        let d2 = UpdateSet::singleton(Update::new(g, vec![a], two));
        assert_eq!(d1.seq_merge(&d2), d2);
        let d3 = UpdateSet::singleton(Update::new(f, vec![b], a));
        assert_eq!(d1.seq_merge(&d3), d1.union(&d3));
    }

    #[test]
    fn carriers_must_be_disjoint_and_carry_booleans() {
        assert!(Universe::new(&["true", "false", "a"], &["a"]).is_err());
        assert!(Universe::new(&["true", "a"], &["0"]).is_err());
        assert!(Universe::new(&["true", "false"], &["true"]).is_err());
        assert!(Universe::new::<&str>(&["true", "false"], &[]).is_err());
    }

    #[test]
    fn tagged_projection() {
        let (s, f, _) = small();
        let (a, b, t) = (el(&s, "a"), el(&s, "b"), el(&s, "true"));
        let tagged: TaggedUpdateSet = [
            TaggedUpdate { update: Update::new(f, vec![a], b), tag: t },
            TaggedUpdate { update: Update::new(f, vec![b], b), tag: a },
        ]
        .into_iter()
        .collect();
        assert_eq!(tagged.project(t), UpdateSet::singleton(Update::new(f, vec![a], b)));
    }

    #[test]
    fn graph_enumerates_in_carrier_order() {
        let (s, f, _) = small();
        let rows: Vec<_> = s.graph(f).map(|(args, _)| args[0]).collect();
        assert_eq!(rows, s.universe().carrier(Sort::Primary).collect::<Vec<_>>());
    }
}
