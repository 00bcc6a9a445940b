//! Hilbert-style derivations: schema instantiation and line checking.

mod check;
mod schema;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::model::{Func, Signature};
use crate::syntax::{Formula, Rule, Term, Var};

pub use check::{check, CheckReport, LineReport, LineStatus, Verdict};
pub use schema::instantiate_schema;

/// Axiom schemas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    U1,
    U2,
    U3,
    U4,
    U5,
    U6,
    U7,
    M1,
    M4,
    M5,
    M6,
    M7,
    M8,
    A1,
    A2,
    P1,
    P2,
    P3,
    EQ1,
    EQ2,
    DY1,
    E,
}

/// Inference rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    M2,
    M3,
    UI,
    EG,
    UG,
    EI,
}

/// What a metavariable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Formula,
    SetVar,
    /// A variable of any of the four sorts.
    Var,
    Term,
    /// A term, or a predicate variable standing for itself.
    TermOrVar,
    Rule,
    Func,
    Terms,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetaValue {
    Formula(Formula),
    Var(Var),
    Term(Term),
    Rule(Rule),
    Func(Func),
    Terms(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Instantiation(pub BTreeMap<String, MetaValue>);

impl Instantiation {
    pub fn with(mut self, name: &str, v: MetaValue) -> Self {
        self.0.insert(name.into(), v);
        self
    }

    pub fn get(&self, name: &str) -> Option<&MetaValue> {
        self.0.get(name)
    }
}

/// Evidence for a semantic side condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Accept the condition unchecked; the line is reported as
    /// ok-modulo-certificates.
    Axiomatic,
    /// Check the condition exhaustively on the named state files.
    States(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Hypothesis,
    Axiom { schema: SchemaId, inst: Instantiation, cert: Option<Certificate> },
    Rule { rule: RuleId, premises: Vec<usize>, inst: Instantiation, cert: Option<Certificate> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// The number written before the dot.
    pub label: usize,
    /// Source line of the step.
    pub line: usize,
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub signature: Arc<Signature>,
    pub hypotheses: Vec<Formula>,
    pub steps: Vec<Step>,
}

use MetaKind as K;

const PHI: (&str, MetaKind) = ("phi", K::Formula);
const PSI: (&str, MetaKind) = ("psi", K::Formula);
const CHI: (&str, MetaKind) = ("chi", K::Formula);
const SET: (&str, MetaKind) = ("X", K::SetVar);
const RULE: (&str, MetaKind) = ("r", K::Rule);

impl SchemaId {
    pub const ALL: [SchemaId; 22] = [
        SchemaId::U1,
        SchemaId::U2,
        SchemaId::U3,
        SchemaId::U4,
        SchemaId::U5,
        SchemaId::U6,
        SchemaId::U7,
        SchemaId::M1,
        SchemaId::M4,
        SchemaId::M5,
        SchemaId::M6,
        SchemaId::M7,
        SchemaId::M8,
        SchemaId::A1,
        SchemaId::A2,
        SchemaId::P1,
        SchemaId::P2,
        SchemaId::P3,
        SchemaId::EQ1,
        SchemaId::EQ2,
        SchemaId::DY1,
        SchemaId::E,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemaId::U1 => "U1",
            SchemaId::U2 => "U2",
            SchemaId::U3 => "U3",
            SchemaId::U4 => "U4",
            SchemaId::U5 => "U5",
            SchemaId::U6 => "U6",
            SchemaId::U7 => "U7",
            SchemaId::M1 => "M1",
            SchemaId::M4 => "M4",
            SchemaId::M5 => "M5",
            SchemaId::M6 => "M6",
            SchemaId::M7 => "M7",
            SchemaId::M8 => "M8",
            SchemaId::A1 => "A1",
            SchemaId::A2 => "A2",
            SchemaId::P1 => "P1",
            SchemaId::P2 => "P2",
            SchemaId::P3 => "P3",
            SchemaId::EQ1 => "EQ1",
            SchemaId::EQ2 => "EQ2",
            SchemaId::DY1 => "DY1",
            SchemaId::E => "E",
        }
    }

    pub fn parse(s: &str) -> Option<SchemaId> {
        SchemaId::ALL.into_iter().find(|id| id.name() == s)
    }

    /// Metavariables of the schema. All are required.
    pub fn metas(self) -> &'static [(&'static str, MetaKind)] {
        match self {
            SchemaId::U1 | SchemaId::U2 | SchemaId::U3 | SchemaId::U4 | SchemaId::U5 | SchemaId::U6 | SchemaId::U7 => {
                &[RULE, SET]
            }
            SchemaId::M1 => &[SET, PHI, PSI],
            SchemaId::M4 | SchemaId::M5 => &[SET, PHI],
            SchemaId::M6 => &[("x", K::Var), SET, PHI],
            SchemaId::M7 | SchemaId::M8 => &[RULE, SET, PHI],
            SchemaId::A1 | SchemaId::A2 => &[SET, ("f", K::Func), ("args", K::Terms), ("y", K::Term)],
            SchemaId::P1 | SchemaId::P3 => &[PHI, PSI],
            SchemaId::P2 => &[PHI, PSI, CHI],
            SchemaId::EQ1 => &[("t", K::Term)],
            SchemaId::EQ2 => &[("f", K::Func), ("lhs", K::Terms), ("rhs", K::Terms)],
            SchemaId::DY1 | SchemaId::E => &[("r1", K::Rule), ("r2", K::Rule), PHI],
        }
    }

    pub fn meta_kind(self, name: &str) -> Option<MetaKind> {
        self.metas().iter().find(|(n, _)| *n == name).map(|&(_, k)| k)
    }

    /// Schemas whose instances are only accepted with a certificate.
    pub fn needs_certificate(self) -> bool {
        self == SchemaId::E
    }
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [RuleId::M2, RuleId::M3, RuleId::UI, RuleId::EG, RuleId::UG, RuleId::EI];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::M2 => "M2",
            RuleId::M3 => "M3",
            RuleId::UI => "UI",
            RuleId::EG => "EG",
            RuleId::UG => "UG",
            RuleId::EI => "EI",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|id| id.name() == s)
    }

    pub fn premises(self) -> usize {
        if self == RuleId::M3 {
            2
        } else {
            1
        }
    }

    /// Metavariables and whether each is required.
    pub fn metas(self) -> &'static [(&'static str, MetaKind, bool)] {
        match self {
            RuleId::M2 => &[("X", K::SetVar, true)],
            RuleId::M3 => &[],
            RuleId::UI | RuleId::EG | RuleId::EI => &[("t", K::TermOrVar, true)],
            RuleId::UG => &[("t", K::TermOrVar, false)],
        }
    }

    pub fn meta_kind(self, name: &str) -> Option<MetaKind> {
        self.metas().iter().find(|(n, _, _)| *n == name).map(|&(_, k, _)| k)
    }

    pub fn needs_certificate(self) -> bool {
        matches!(self, RuleId::UG | RuleId::EI)
    }
}
