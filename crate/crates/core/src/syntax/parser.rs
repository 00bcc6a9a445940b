//! Recursive-descent parser for rules, formulas, machines, states and
//! derivations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ast::{Formula, Rule, Term, Var, VarSort};
use super::derived;
use super::lexer::{tokenize, Tok, Token};
use super::ops::{self, Fresh};
use crate::error::{Error, Result};
use crate::model::{Elem, Func, FuncKind, Signature, State, Universe};
use crate::proof::{
    Certificate, Derivation, Instantiation, Justification, MetaKind, MetaValue, RuleId, SchemaId, Step,
};

const KEYWORDS: &[&str] = &[
    "if", "then", "endif", "forall", "exists", "with", "do", "enddo", "choose", "par", "endpar", "seq", "endseq",
    "upd", "con", "conUSet", "wcon", "scon", "joinable", "signature", "function", "define", "rule", "formula",
    "initial", "final", "hypothesis", "proof", "functions", "default",
];

pub fn is_keyword(w: &str) -> bool {
    KEYWORDS.contains(&w)
}

/// Which set of states a machine designates as initial or final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSet {
    All,
    Nothing,
    Formula(Formula),
    Listed(Vec<State>),
}

/// A closed main rule with its signature and initial/final designations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub signature: Arc<Signature>,
    pub rule: Rule,
    pub initial: StateSet,
    pub final_states: StateSet,
}

/// Contents of a formula file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaFile {
    pub signature: Arc<Signature>,
    pub formulas: Vec<Formula>,
}

enum WordClass {
    Lower,
    Upper,
    Digit,
}

fn class(w: &str) -> WordClass {
    match w.chars().next() {
        Some(c) if c.is_ascii_uppercase() => WordClass::Upper,
        Some(c) if c.is_ascii_digit() => WordClass::Digit,
        _ => WordClass::Lower,
    }
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub sig: Signature,
    pub defs: BTreeMap<String, Rule>,
}

impl Parser {
    pub fn new(src: &str, sig: Signature) -> Result<Self> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, sig, defs: BTreeMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn sort_err(&self, at: (usize, usize), e: Error) -> Error {
        match e {
            Error::Sort(m) => Error::Sort(format!("{}:{}: {m}", at.0, at.1)),
            other => other,
        }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Dollar(w) => format!("`${w}`"),
            Tok::At(w) => format!("`@{w}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", Self::describe(&tok), Self::describe(self.peek())))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {}", Self::describe(self.peek())))
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            t => self.err(format!("expected an identifier, found {}", Self::describe(&t))),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let w = self.word()?;
        match w.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("expected a number, found `{w}`"))
            }
        }
    }

    pub fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", Self::describe(self.peek())))
        }
    }

    fn fresh(&self) -> Fresh {
        Fresh::for_signature(&self.sig)
    }

    // ---- variables and terms ------------------------------------------

    fn is_var_token(&self) -> bool {
        match self.peek() {
            Tok::Word(w) => !is_keyword(w) && self.sig.lookup(w).is_none() && !matches!(class(w), WordClass::Digit),
            Tok::Dollar(_) | Tok::At(_) => true,
            _ => false,
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.peek().clone() {
            Tok::Dollar(w) => {
                self.bump();
                Ok(Var::secondary(&w))
            }
            Tok::At(w) => {
                self.bump();
                Ok(Var::tagged(&w))
            }
            Tok::Word(w) if self.is_var_token() => {
                self.bump();
                Ok(match class(&w) {
                    WordClass::Upper => Var::set(&w),
                    _ => Var::primary(&w),
                })
            }
            t => self.err(format!("expected a variable, found {}", Self::describe(&t))),
        }
    }

    fn set_var(&mut self) -> Result<Var> {
        let at = self.here();
        let v = self.var()?;
        if v.sort != VarSort::Set {
            return Err(Error::Sort(format!("{}:{}: expected a set variable, found `{}`", at.0, at.1, v.name)));
        }
        Ok(v)
    }

    pub fn term(&mut self) -> Result<Term> {
        let at = self.here();
        let t = match self.peek().clone() {
            Tok::Dollar(w) => {
                self.bump();
                Term::Var(Var::secondary(&w))
            }
            Tok::Word(w) => {
                if is_keyword(&w) {
                    return self.err(format!("keyword `{w}` cannot start a term"));
                }
                if let Some(f) = self.sig.lookup(&w) {
                    self.bump();
                    let args = if *self.peek() == Tok::LParen { self.term_tuple()? } else { Vec::new() };
                    Term::App(f, args)
                } else {
                    match class(&w) {
                        WordClass::Lower => {
                            self.bump();
                            Term::Var(Var::primary(&w))
                        }
                        WordClass::Upper => return self.err(format!("`{w}` is not a function; set variables are not terms")),
                        WordClass::Digit => return self.err(format!("atom `{w}` cannot be used as a term")),
                    }
                }
            }
            t => return self.err(format!("expected a term, found {}", Self::describe(&t))),
        };
        ops::sort_of(&t, &self.sig).map_err(|e| self.sort_err(at, e))?;
        Ok(t)
    }

    /// `(t1, …, tn)`, possibly empty.
    fn term_tuple(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                out.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    /// Argument position of a membership atom: a tuple or a single term.
    fn arg_tuple(&mut self) -> Result<Vec<Term>> {
        if *self.peek() == Tok::LParen {
            self.term_tuple()
        } else {
            Ok(alloc::vec![self.term()?])
        }
    }

    fn func_name(&mut self) -> Result<Func> {
        let w = self.word()?;
        match self.sig.lookup(&w) {
            Some(f) => Ok(f),
            None => {
                self.pos -= 1;
                self.err(format!("unknown function `{w}`"))
            }
        }
    }

    // ---- formulas -----------------------------------------------------

    pub fn formula(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let lhs = self.conjunction()?;
        if *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.disjunction()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.conjunction()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantifier_binders(&mut self) -> Result<Vec<Var>> {
        let mut vs = Vec::new();
        while *self.peek() != Tok::LParen {
            vs.push(self.var()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        if vs.is_empty() {
            return self.err("quantifier without variables");
        }
        Ok(vs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Word(w) if w == "forall" || w == "exists" => {
                self.bump();
                let vs = self.quantifier_binders()?;
                self.expect(Tok::LParen)?;
                let body = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(if w == "forall" { Formula::forall_many(vs, body) } else { Formula::exists_many(vs, body) })
            }
            Tok::LBrack => {
                self.bump();
                let modal_var = match (self.peek(), self.peek_at(1)) {
                    (Tok::Word(w), Tok::RBrack) => {
                        matches!(class(w), WordClass::Upper) && self.sig.lookup(w).is_none() && !self.defs.contains_key(w)
                    }
                    _ => false,
                };
                if modal_var {
                    let x = self.set_var()?;
                    self.expect(Tok::RBrack)?;
                    let body = self.unary()?;
                    Ok(Formula::modal(x, body))
                } else {
                    let r = self.block()?;
                    self.expect(Tok::RBrack)?;
                    let body = self.unary()?;
                    Ok(derived::box_rule(&r, body, &mut self.fresh()))
                }
            }
            Tok::Lt => {
                self.bump();
                let r = self.block()?;
                self.expect(Tok::Gt)?;
                let body = self.unary()?;
                Ok(derived::diamond_rule(&r, body, &mut self.fresh()))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let at = self.here();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Word(w) if (w == "true" || w == "false") && !matches!(self.peek_at(1), Tok::Eq | Tok::Neq) => {
                self.bump();
                Ok(if w == "true" { Formula::top() } else { Formula::bottom() })
            }
            Tok::Word(w) if is_keyword(&w) && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let f = match w.as_str() {
                    "upd" => {
                        let r = self.block()?;
                        self.expect(Tok::Comma)?;
                        let x = self.set_var()?;
                        Formula::upd(r, x)
                    }
                    "conUSet" => {
                        let x = self.set_var()?;
                        derived::con_uset(&self.sig, &x, &mut self.fresh())
                    }
                    "con" => {
                        let r = self.block()?;
                        self.expect(Tok::Comma)?;
                        let x = self.set_var()?;
                        derived::con(&self.sig, &r, &x, &mut self.fresh())
                    }
                    "wcon" | "scon" => {
                        let r = self.block()?;
                        let mut fresh = self.fresh();
                        if w == "wcon" {
                            derived::wcon(&self.sig, &r, &mut fresh)
                        } else {
                            derived::scon(&self.sig, &r, &mut fresh)
                        }
                    }
                    "joinable" => {
                        let r1 = self.block()?;
                        self.expect(Tok::Comma)?;
                        let r2 = self.block()?;
                        derived::joinable(&self.sig, &r1, &r2, &mut self.fresh())
                    }
                    _ => {
                        self.pos -= 2;
                        return self.err(format!("`{w}` cannot start a formula"));
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Word(w)
                if matches!(class(&w), WordClass::Upper)
                    && self.sig.lookup(&w).is_none()
                    && *self.peek_at(1) == Tok::LParen =>
            {
                let set = self.set_var()?;
                self.membership(set, at, false)
            }
            Tok::At(_) => {
                let set = self.var()?;
                self.membership(set, at, true)
            }
            _ => {
                let lhs = self.term()?;
                let neg = match self.peek() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    t => return self.err(format!("expected `=` or `!=`, found {}", Self::describe(t))),
                };
                self.bump();
                let rhs = self.term()?;
                let eq = Formula::eq(lhs, rhs);
                ops::check_formula(&eq, &self.sig).map_err(|e| self.sort_err(at, e))?;
                Ok(if neg { Formula::not(eq) } else { eq })
            }
        }
    }

    fn membership(&mut self, set: Var, at: (usize, usize), tagged: bool) -> Result<Formula> {
        self.expect(Tok::LParen)?;
        let func = self.func_name()?;
        self.expect(Tok::Comma)?;
        let args = self.arg_tuple()?;
        self.expect(Tok::Comma)?;
        let value = self.term()?;
        let f = if tagged {
            self.expect(Tok::Comma)?;
            let tag = self.term()?;
            Formula::In2 { set, func, args, value, tag }
        } else {
            Formula::In1 { set, func, args, value }
        };
        self.expect(Tok::RParen)?;
        ops::check_formula(&f, &self.sig).map_err(|e| self.sort_err(at, e))?;
        Ok(f)
    }

    // ---- rules --------------------------------------------------------

    fn starts_rule(&self) -> bool {
        match self.peek() {
            Tok::Word(w) => {
                matches!(w.as_str(), "if" | "forall" | "choose" | "par" | "seq")
                    || self.sig.lookup(w).is_some()
                    || self.defs.contains_key(w)
            }
            _ => false,
        }
    }

    fn rule_atoms(&mut self) -> Result<Vec<Rule>> {
        let mut out = Vec::new();
        while self.starts_rule() {
            out.push(self.rule_atom()?);
        }
        if out.is_empty() {
            return self.err(format!("expected a rule, found {}", Self::describe(self.peek())));
        }
        Ok(out)
    }

    /// One or more rules; several rules side by side run in parallel.
    pub fn block(&mut self) -> Result<Rule> {
        let mut items = self.rule_atoms()?;
        let mut acc = items.pop().unwrap();
        while let Some(r) = items.pop() {
            acc = Rule::par(r, acc);
        }
        Ok(acc)
    }

    fn rule_binders(&mut self) -> Result<Vec<(Var, (usize, usize))>> {
        let mut vs = Vec::new();
        loop {
            let at = self.here();
            vs.push((self.var()?, at));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(vs)
    }

    fn guard(&mut self) -> Result<Formula> {
        let at = self.here();
        let g = self.formula()?;
        ops::check_guard(&g, &self.sig).map_err(|e| self.sort_err(at, e))?;
        Ok(g)
    }

    fn rule_atom(&mut self) -> Result<Rule> {
        let at = self.here();
        let w = match self.peek().clone() {
            Tok::Word(w) => w,
            t => return self.err(format!("expected a rule, found {}", Self::describe(&t))),
        };
        match w.as_str() {
            "if" => {
                self.bump();
                let g = self.guard()?;
                self.expect_word("then")?;
                let body = self.block()?;
                self.expect_word("endif")?;
                Ok(Rule::if_then(g, body))
            }
            "forall" | "choose" => {
                self.bump();
                let vs = self.rule_binders()?;
                for (v, vat) in &vs {
                    let ok = if w == "forall" { v.sort == VarSort::Primary } else { v.sort.individual().is_some() };
                    if !ok {
                        let what = if w == "forall" {
                            "forall binders must range over the primary carrier"
                        } else {
                            "choose binders must be individual variables"
                        };
                        return Err(Error::Sort(format!("{}:{}: `{}`: {what}", vat.0, vat.1, ops::var_text(v))));
                    }
                }
                self.expect_word("with")?;
                let g = self.guard()?;
                self.expect_word("do")?;
                let body = self.block()?;
                self.expect_word("enddo")?;
                Ok(desugar_binders(w == "forall", vs.into_iter().map(|(v, _)| v).collect(), g, body))
            }
            "par" => {
                self.bump();
                let r = self.block()?;
                self.expect_word("endpar")?;
                Ok(r)
            }
            "seq" => {
                self.bump();
                let mut items = self.rule_atoms()?;
                self.expect_word("endseq")?;
                let mut acc = items.pop().unwrap();
                while let Some(r) = items.pop() {
                    acc = Rule::seq(r, acc);
                }
                Ok(acc)
            }
            _ => {
                if let Some(f) = self.sig.lookup(&w) {
                    self.bump();
                    let args = if *self.peek() == Tok::LParen { self.term_tuple()? } else { Vec::new() };
                    self.expect(Tok::Assign)?;
                    let value = self.term()?;
                    let r = Rule::update(f, args, value);
                    ops::check_rule(&r, &self.sig).map_err(|e| self.sort_err(at, e))?;
                    Ok(r)
                } else if let Some(r) = self.defs.get(&w) {
                    let r = r.clone();
                    self.bump();
                    Ok(r)
                } else {
                    self.err(format!("expected a rule, found `{w}`"))
                }
            }
        }
    }

    // ---- file sections --------------------------------------------------

    fn section(&mut self, name: &str) -> Result<()> {
        self.expect_word(name)?;
        self.expect(Tok::Colon)
    }

    fn kind(&mut self) -> Result<FuncKind> {
        match self.word()?.as_str() {
            "primary" => Ok(FuncKind::Primary),
            "secondary" => Ok(FuncKind::Secondary),
            "bridge" => Ok(FuncKind::Bridge),
            w => {
                self.pos -= 1;
                self.err(format!("expected primary, secondary or bridge, found `{w}`"))
            }
        }
    }

    fn staticness(&mut self) -> Result<bool> {
        match self.word()?.as_str() {
            "static" => Ok(false),
            "dynamic" => Ok(true),
            w => {
                self.pos -= 1;
                self.err(format!("expected static or dynamic, found `{w}`"))
            }
        }
    }

    /// `function NAME/ARITY KIND STATICNESS`
    fn declaration(&mut self) -> Result<Func> {
        self.expect_word("function")?;
        let at = self.here();
        let name = self.word()?;
        if is_keyword(&name) || matches!(class(&name), WordClass::Digit) {
            self.pos -= 1;
            return self.err(format!("`{name}` cannot be a function name"));
        }
        self.expect(Tok::Slash)?;
        let arity = self.number()?;
        let kind = self.kind()?;
        let dynamic = self.staticness()?;
        self.sig.declare(&name, arity, kind, dynamic).map_err(|e| self.sort_err(at, e))
    }

    fn signature_section(&mut self) -> Result<()> {
        self.section("signature")?;
        while self.is_word("function") {
            self.declaration()?;
        }
        Ok(())
    }

    fn definitions(&mut self) -> Result<()> {
        while self.is_word("define") {
            self.bump();
            let name = self.word()?;
            if is_keyword(&name) || self.sig.lookup(&name).is_some() || !matches!(class(&name), WordClass::Lower) {
                self.pos -= 1;
                return self.err(format!("`{name}` cannot name a rule"));
            }
            self.expect(Tok::Eq)?;
            let r = self.block()?;
            self.defs.insert(name, r);
        }
        Ok(())
    }

    fn machine(&mut self) -> Result<Machine> {
        self.signature_section()?;
        self.definitions()?;
        self.section("rule")?;
        let at = self.here();
        let rule = self.block()?;
        let free = ops::FreeVars::free_variables(&rule);
        if let Some(v) = free.iter().next() {
            return Err(Error::Sort(format!("{}:{}: main rule has free variable `{}`", at.0, at.1, ops::var_text(v))));
        }
        let mut initial = StateSet::All;
        let mut final_states = StateSet::Nothing;
        if self.is_word("initial") {
            self.section("initial")?;
            initial = StateSet::Formula(self.closed_formula()?);
        }
        if self.is_word("final") {
            self.section("final")?;
            final_states = StateSet::Formula(self.closed_formula()?);
        }
        self.expect_end()?;
        Ok(Machine { signature: Arc::new(self.sig.clone()), rule, initial, final_states })
    }

    fn closed_formula(&mut self) -> Result<Formula> {
        let at = self.here();
        let f = self.formula()?;
        if let Some(v) = ops::FreeVars::free_variables(&f).iter().next() {
            return Err(Error::Sort(format!("{}:{}: free variable `{}`", at.0, at.1, ops::var_text(v))));
        }
        Ok(f)
    }

    fn formula_file(&mut self) -> Result<FormulaFile> {
        self.signature_section()?;
        self.definitions()?;
        let mut formulas = Vec::new();
        while self.is_word("formula") {
            self.section("formula")?;
            formulas.push(self.formula()?);
        }
        if formulas.is_empty() {
            return self.err("expected `formula:`");
        }
        self.expect_end()?;
        Ok(FormulaFile { signature: Arc::new(self.sig.clone()), formulas })
    }

    fn atoms_until_section(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        loop {
            match (self.peek().clone(), self.peek_at(1)) {
                (Tok::Word(_), Tok::Colon | Tok::Minus) | (Tok::Eof, _) => break,
                (Tok::Word(w), _) => {
                    self.bump();
                    out.push(w);
                }
                (t, _) => return self.err(format!("expected an atom, found {}", Self::describe(&t))),
            }
        }
        Ok(out)
    }

    fn atom_value(&mut self, univ: &Universe) -> Result<Elem> {
        let w = self.word()?;
        match univ.lookup(&w) {
            Some(e) => Ok(e),
            None => {
                self.pos -= 1;
                self.err(format!("unknown atom `{w}`"))
            }
        }
    }

    fn state(&mut self) -> Result<State> {
        self.expect_word("primary")?;
        self.expect(Tok::Minus)?;
        self.section("carrier")?;
        let primary = self.atoms_until_section()?;
        self.expect_word("secondary")?;
        self.expect(Tok::Minus)?;
        self.section("carrier")?;
        let secondary = self.atoms_until_section()?;
        let at = self.here();
        let univ = Universe::new(&primary, &secondary).map_err(|e| match e {
            Error::State(m) => Error::State(format!("{}:{}: {m}", at.0, at.1)),
            e => e,
        })?;
        self.section("functions")?;
        let mut defaults = alloc::vec![univ.true_elem(), univ.false_elem()];
        let mut rows: Vec<((usize, usize), Func, Vec<Elem>, Elem)> = Vec::new();
        while self.is_word("function") {
            let f = self.declaration()?;
            self.expect_word("default")?;
            defaults.push(self.atom_value(&univ)?);
            let name = self.sig.name(f).to_string();
            while self.is_word(&name) {
                let at = self.here();
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.atom_value(&univ)?);
                            if *self.peek() == Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                self.expect(Tok::Eq)?;
                let v = self.atom_value(&univ)?;
                rows.push((at, f, args, v));
            }
        }
        self.expect_end()?;
        let mut state = State::new(Arc::new(self.sig.clone()), Arc::new(univ), &defaults)?;
        for (at, f, args, v) in rows {
            state.set(f, &args, v).map_err(|e| match e {
                Error::State(m) => Error::State(format!("{}:{}: {m}", at.0, at.1)),
                e => e,
            })?;
        }
        Ok(state)
    }

    // ---- derivations ----------------------------------------------------

    fn meta_value(&mut self, kind: MetaKind) -> Result<MetaValue> {
        Ok(match kind {
            MetaKind::Formula => MetaValue::Formula(self.formula()?),
            MetaKind::SetVar => MetaValue::Var(self.set_var()?),
            MetaKind::Var => MetaValue::Var(self.var()?),
            MetaKind::Term => MetaValue::Term(self.term()?),
            MetaKind::TermOrVar => {
                let is_pred = match self.peek() {
                    Tok::At(_) => true,
                    Tok::Word(w) => matches!(class(w), WordClass::Upper) && self.sig.lookup(w).is_none(),
                    _ => false,
                };
                if is_pred {
                    MetaValue::Var(self.var()?)
                } else {
                    MetaValue::Term(self.term()?)
                }
            }
            MetaKind::Rule => MetaValue::Rule(self.block()?),
            MetaKind::Func => MetaValue::Func(self.func_name()?),
            MetaKind::Terms => MetaValue::Terms(self.term_tuple()?),
        })
    }

    fn instantiation(&mut self, kind_of: impl Fn(&str) -> Option<MetaKind>) -> Result<Instantiation> {
        let mut inst = Instantiation::default();
        if *self.peek() != Tok::LBrack {
            return Ok(inst);
        }
        self.bump();
        if *self.peek() != Tok::RBrack {
            loop {
                let name = match self.peek().clone() {
                    Tok::Word(w) => {
                        self.bump();
                        w
                    }
                    t => return self.err(format!("expected a metavariable, found {}", Self::describe(&t))),
                };
                let Some(kind) = kind_of(&name) else {
                    self.pos -= 1;
                    return self.err(format!("unknown metavariable `{name}`"));
                };
                self.expect(Tok::Assign)?;
                let v = self.meta_value(kind)?;
                if inst.0.insert(name.clone(), v).is_some() {
                    return self.err(format!("metavariable `{name}` bound twice"));
                }
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBrack)?;
        Ok(inst)
    }

    fn certificate(&mut self) -> Result<Option<Certificate>> {
        if !self.is_word("cert") {
            return Ok(None);
        }
        self.bump();
        if self.is_word("axiomatic") {
            self.bump();
            return Ok(Some(Certificate::Axiomatic));
        }
        self.expect_word("states")?;
        self.expect(Tok::LParen)?;
        let mut files = Vec::new();
        loop {
            match self.bump() {
                Tok::Str(s) => files.push(s),
                t => {
                    self.pos -= 1;
                    return self.err(format!("expected a quoted file name, found {}", Self::describe(&t)));
                }
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Some(Certificate::States(files)))
    }

    fn justification(&mut self) -> Result<Justification> {
        let w = self.word()?;
        match w.as_str() {
            "hyp" => Ok(Justification::Hypothesis),
            "axiom" => {
                let id_at = self.here();
                let id = self.word()?;
                let Some(schema) = SchemaId::parse(&id) else {
                    return Err(Error::Syntax { line: id_at.0, col: id_at.1, msg: format!("unknown axiom `{id}`") });
                };
                let inst = self.instantiation(|m| schema.meta_kind(m))?;
                let cert = self.certificate()?;
                Ok(Justification::Axiom { schema, inst, cert })
            }
            "rule" => {
                let id_at = self.here();
                let id = self.word()?;
                let Some(rule) = RuleId::parse(&id) else {
                    return Err(Error::Syntax { line: id_at.0, col: id_at.1, msg: format!("unknown inference rule `{id}`") });
                };
                self.expect(Tok::LParen)?;
                let mut premises = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        premises.push(self.number()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                let inst = self.instantiation(|m| rule.meta_kind(m))?;
                let cert = self.certificate()?;
                Ok(Justification::Rule { rule, premises, inst, cert })
            }
            _ => {
                self.pos -= 1;
                self.err(format!("expected hyp, axiom or rule, found `{w}`"))
            }
        }
    }

    fn derivation(&mut self) -> Result<Derivation> {
        self.signature_section()?;
        self.definitions()?;
        let mut hypotheses = Vec::new();
        while self.is_word("hypothesis") {
            self.section("hypothesis")?;
            hypotheses.push(self.formula()?);
        }
        self.section("proof")?;
        let mut steps = Vec::new();
        while !self.at_end() {
            let line = self.here().0;
            let label = self.number()?;
            self.expect(Tok::Dot)?;
            let formula = self.formula()?;
            self.expect(Tok::Semi)?;
            let justification = self.justification()?;
            steps.push(Step { label, line, formula, justification });
        }
        Ok(Derivation { signature: Arc::new(self.sig.clone()), hypotheses, steps })
    }
}

/// `forall x, y with φ do r` ⇒ `forall x with ∃y φ do forall y with φ do r`,
/// and likewise for choose.
pub fn desugar_binders(is_forall: bool, vs: Vec<Var>, guard: Formula, body: Rule) -> Rule {
    let mk = |v: Var, g: Formula, b: Rule| if is_forall { Rule::forall(v, g, b) } else { Rule::choose(v, g, b) };
    let n = vs.len();
    let mut acc = body;
    for i in (0..n).rev() {
        let g = Formula::exists_many(vs[i + 1..].to_vec(), guard.clone());
        acc = mk(vs[i].clone(), g, acc);
    }
    acc
}

fn run<T>(src: &str, sig: Signature, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
    let mut p = Parser::new(src, sig)?;
    let out = f(&mut p)?;
    p.expect_end()?;
    Ok(out)
}

/// Parses a rule (several top-level rules form a `par`).
pub fn parse_rule(src: &str, sig: &Signature) -> Result<Rule> {
    run(src, sig.clone(), |p| p.block())
}

pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula> {
    run(src, sig.clone(), |p| {
        let at = p.here();
        let f = p.formula()?;
        ops::check_formula(&f, &p.sig).map_err(|e| p.sort_err(at, e))?;
        Ok(f)
    })
}

pub fn parse_term(src: &str, sig: &Signature) -> Result<Term> {
    run(src, sig.clone(), |p| p.term())
}

pub fn parse_state(src: &str) -> Result<State> {
    run(src, Signature::new(), |p| p.state())
}

pub fn parse_machine(src: &str) -> Result<Machine> {
    run(src, Signature::new(), |p| p.machine())
}

/// Parses a formula file; the name mirrors the logic's name 𝓛.
pub fn parse_lformula(src: &str) -> Result<FormulaFile> {
    run(src, Signature::new(), |p| p.formula_file())
}

pub fn parse_derivation(src: &str) -> Result<Derivation> {
    run(src, Signature::new(), |p| p.derivation())
}

/// Parses `x=a, $y=0, X={f(a):=b}, @Z={f(a):=b@c}` against a state.
pub fn parse_bindings(src: &str, state: &State) -> Result<crate::semantics::Valuation> {
    use crate::model::{TaggedUpdate, TaggedUpdateSet, Update, UpdateSet};
    let univ = state.universe().clone();
    let mut p = Parser::new(src, (**state.signature()).clone())?;
    let mut val = crate::semantics::Valuation::new();
    while !p.at_end() {
        let at = p.here();
        let v = p.var()?;
        p.expect(Tok::Eq)?;
        match v.sort {
            VarSort::Primary | VarSort::Secondary => {
                let e = p.atom_value(&univ)?;
                if v.sort.individual() != Some(univ.sort_of(e)) {
                    return Err(Error::Sort(format!("{}:{}: `{}` bound to an atom of the wrong carrier", at.0, at.1, ops::var_text(&v))));
                }
                val.bind(v, e);
            }
            VarSort::Set | VarSort::TaggedSet => {
                p.expect(Tok::LBrace)?;
                let mut plain = UpdateSet::new();
                let mut tagged = TaggedUpdateSet::new();
                while *p.peek() != Tok::RBrace {
                    let uat = p.here();
                    let f = p.func_name()?;
                    let mut args = Vec::new();
                    if *p.peek() == Tok::LParen {
                        p.bump();
                        while *p.peek() != Tok::RParen {
                            args.push(p.atom_value(&univ)?);
                            if *p.peek() == Tok::Comma {
                                p.bump();
                            }
                        }
                        p.bump();
                    }
                    p.expect(Tok::Assign)?;
                    let value = p.atom_value(&univ)?;
                    let u = Update::new(f, args, value);
                    state.check_update(&u).map_err(|e| match e {
                        Error::State(m) => Error::State(format!("{}:{}: {m}", uat.0, uat.1)),
                        e => e,
                    })?;
                    if v.sort == VarSort::TaggedSet {
                        let tag = match p.bump() {
                            Tok::At(w) => univ.lookup(&w).filter(|&e| univ.sort_of(e) == crate::model::Sort::Primary),
                            _ => None,
                        };
                        let Some(tag) = tag else { return p.err("expected `@tag` naming a primary atom") };
                        tagged.insert(TaggedUpdate { update: u, tag });
                    } else {
                        plain.insert(u);
                    }
                    if *p.peek() == Tok::Comma {
                        p.bump();
                    }
                }
                p.bump();
                if v.sort == VarSort::TaggedSet {
                    val.bind_tagged(v, tagged);
                } else {
                    val.bind_set(v, plain);
                }
            }
        }
        if *p.peek() == Tok::Comma || *p.peek() == Tok::Semi {
            p.bump();
        }
    }
    Ok(val)
}
