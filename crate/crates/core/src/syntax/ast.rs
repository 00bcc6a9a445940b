use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::model::{Func, Sort};

/// The four variable sorts of the logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarSort {
    /// ranges over B1, written `x`
    Primary,
    /// ranges over B2, written `$x`
    Secondary,
    /// ranges over finite sets of update triples, written `X`
    Set,
    /// ranges over finite sets of tagged update quadruples, written `@X`
    TaggedSet,
}

impl VarSort {
    pub fn individual(self) -> Option<Sort> {
        match self {
            VarSort::Primary => Some(Sort::Primary),
            VarSort::Secondary => Some(Sort::Secondary),
            _ => None,
        }
    }

    pub fn of_sort(sort: Sort) -> VarSort {
        match sort {
            Sort::Primary => VarSort::Primary,
            Sort::Secondary => VarSort::Secondary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Arc<str>,
    pub sort: VarSort,
}

impl Var {
    pub fn new(name: &str, sort: VarSort) -> Var {
        Var { name: Arc::from(name), sort }
    }

    pub fn primary(name: &str) -> Var {
        Var::new(name, VarSort::Primary)
    }

    pub fn secondary(name: &str) -> Var {
        Var::new(name, VarSort::Secondary)
    }

    pub fn set(name: &str) -> Var {
        Var::new(name, VarSort::Set)
    }

    pub fn tagged(name: &str) -> Var {
        Var::new(name, VarSort::TaggedSet)
    }

    pub fn individual(name: &str, sort: Sort) -> Var {
        Var::new(name, VarSort::of_sort(sort))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Func, Vec<Term>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn constant(f: Func) -> Term {
        Term::App(f, Vec::new())
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }
}

/// Formulas of the logic; rule guards use the first-order fragment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `X(f, args, value)`
    In1 { set: Var, func: Func, args: Vec<Term>, value: Term },
    /// `@X(f, args, value, tag)`
    In2 { set: Var, func: Func, args: Vec<Term>, value: Term, tag: Term },
    Upd(Box<Rule>, Var),
    /// `[X] φ`
    Modal(Var, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Update { func: Func, args: Vec<Term>, value: Term },
    If { guard: Formula, body: Box<Rule> },
    Forall { var: Var, guard: Formula, body: Box<Rule> },
    Choose { var: Var, guard: Formula, body: Box<Rule> },
    Par(Box<Rule>, Box<Rule>),
    Seq(Box<Rule>, Box<Rule>),
}

impl Rule {
    pub fn update(func: Func, args: Vec<Term>, value: Term) -> Rule {
        Rule::Update { func, args, value }
    }

    pub fn if_then(guard: Formula, body: Rule) -> Rule {
        Rule::If { guard, body: Box::new(body) }
    }

    pub fn forall(var: Var, guard: Formula, body: Rule) -> Rule {
        Rule::Forall { var, guard, body: Box::new(body) }
    }

    pub fn choose(var: Var, guard: Formula, body: Rule) -> Rule {
        Rule::Choose { var, guard, body: Box::new(body) }
    }

    pub fn par(a: Rule, b: Rule) -> Rule {
        Rule::Par(Box::new(a), Box::new(b))
    }

    pub fn seq(a: Rule, b: Rule) -> Rule {
        Rule::Seq(Box::new(a), Box::new(b))
    }

    /// True when no `choose` occurs, i.e. the rule is hierarchical.
    pub fn is_deterministic(&self) -> bool {
        match self {
            Rule::Update { .. } => true,
            Rule::If { body, .. } | Rule::Forall { body, .. } => body.is_deterministic(),
            Rule::Choose { .. } => false,
            Rule::Par(a, b) | Rule::Seq(a, b) => a.is_deterministic() && b.is_deterministic(),
        }
    }

    /// Nesting depth of rule constructors (updates have depth 0).
    pub fn depth(&self) -> usize {
        match self {
            Rule::Update { .. } => 0,
            Rule::If { body, .. } | Rule::Forall { body, .. } | Rule::Choose { body, .. } => 1 + body.depth(),
            Rule::Par(a, b) | Rule::Seq(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::not(Formula::forall(v, Formula::not(body)))
    }

    pub fn forall_many(vs: Vec<Var>, body: Formula) -> Formula {
        vs.into_iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_many(vs: Vec<Var>, body: Formula) -> Formula {
        vs.into_iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn modal(x: Var, body: Formula) -> Formula {
        Formula::Modal(x, Box::new(body))
    }

    pub fn upd(r: Rule, x: Var) -> Formula {
        Formula::Upd(Box::new(r), x)
    }

    /// `true = true`
    pub fn top() -> Formula {
        let t = Term::constant(crate::model::Signature::TRUE);
        Formula::Eq(t.clone(), t)
    }

    pub fn bottom() -> Formula {
        Formula::not(Formula::top())
    }

    /// Conjunction of all items; the empty conjunction is `true`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.len() {
            0 => Formula::top(),
            _ => {
                let mut acc = items.pop().unwrap();
                while let Some(f) = items.pop() {
                    acc = Formula::and(f, acc);
                }
                acc
            }
        }
    }

    /// Disjunction of all items; the empty disjunction is `false`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.len() {
            0 => Formula::bottom(),
            _ => {
                let mut acc = items.pop().unwrap();
                while let Some(f) = items.pop() {
                    acc = Formula::or(f, acc);
                }
                acc
            }
        }
    }

    /// Number of AST nodes, terms included.
    pub fn size(&self) -> usize {
        fn term(t: &Term) -> usize {
            match t {
                Term::Var(_) => 1,
                Term::App(_, args) => 1 + args.iter().map(term).sum::<usize>(),
            }
        }
        fn rule(r: &Rule) -> usize {
            match r {
                Rule::Update { args, value, .. } => 1 + args.iter().map(term).sum::<usize>() + term(value),
                Rule::If { guard, body } => 1 + guard.size() + rule(body),
                Rule::Forall { guard, body, .. } | Rule::Choose { guard, body, .. } => 2 + guard.size() + rule(body),
                Rule::Par(a, b) | Rule::Seq(a, b) => 1 + rule(a) + rule(b),
            }
        }
        match self {
            Formula::Eq(a, b) => 1 + term(a) + term(b),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, a) | Formula::Modal(_, a) => 2 + a.size(),
            Formula::In1 { args, value, .. } => 2 + args.iter().map(term).sum::<usize>() + term(value),
            Formula::In2 { args, value, tag, .. } => {
                2 + args.iter().map(term).sum::<usize>() + term(value) + term(tag)
            }
            Formula::Upd(r, _) => 2 + rule(r),
        }
    }
}
