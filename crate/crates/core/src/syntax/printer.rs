//! Canonical text for ASTs, states and update sets. Derived connectives are
//! re-sugared where the pattern is unambiguous so output stays readable;
//! parsing the output yields the original AST.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::ast::{Formula, Rule, Term, Var};
use super::ops::var_text;
use super::parser::{FormulaFile, Machine, StateSet};
use crate::model::{Elem, Family, Signature, State, Universe, Update, UpdateSet};

pub fn term_text(t: &Term, sig: &Signature) -> String {
    let mut s = String::new();
    write_term(&mut s, t, sig);
    s
}

fn write_term(out: &mut String, t: &Term, sig: &Signature) {
    match t {
        Term::Var(v) => out.push_str(&var_text(v)),
        Term::App(f, args) => {
            out.push_str(sig.name(*f));
            if !args.is_empty() {
                write_tuple(out, args, sig);
            }
        }
    }
}

fn write_tuple(out: &mut String, args: &[Term], sig: &Signature) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, a, sig);
    }
    out.push(')');
}

enum View<'a> {
    Top,
    Bottom,
    Iff(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Not(&'a Formula),
    Neq(&'a Term, &'a Term),
    Exists(&'a Var, &'a Formula),
    Other,
}

const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const ATOM: u8 = 4;

fn is_true_const(t: &Term) -> bool {
    matches!(t, Term::App(f, args) if *f == Signature::TRUE && args.is_empty())
}

fn implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(a, nb) = inner.as_ref() {
            if let Formula::Not(b) = nb.as_ref() {
                return Some((a, b));
            }
        }
    }
    None
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::Eq(a, b) if is_true_const(a) && is_true_const(b) => View::Top,
        Formula::And(l, r) => {
            if let (Some((a, b)), Some((b2, a2))) = (implication(l), implication(r)) {
                if a == a2 && b == b2 {
                    return View::Iff(a, b);
                }
            }
            View::And(l, r)
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Eq(a, b) if is_true_const(a) && is_true_const(b) => View::Bottom,
            Formula::Eq(a, b) => View::Neq(a, b),
            Formula::And(na, nb) => match (na.as_ref(), nb.as_ref()) {
                (Formula::Not(a), Formula::Not(b)) => View::Or(a, b),
                (a, Formula::Not(b)) => View::Imp(a, b),
                _ => View::Not(inner),
            },
            Formula::Forall(v, nb) => match nb.as_ref() {
                Formula::Not(b) => View::Exists(v, b),
                _ => View::Not(inner),
            },
            _ => View::Not(inner),
        },
        _ => View::Other,
    }
}

fn level(f: &Formula) -> u8 {
    match view(f) {
        View::Iff(..) => IFF,
        View::Imp(..) => IMP,
        View::Or(..) => OR,
        View::And(..) => AND,
        _ => ATOM,
    }
}

pub fn formula_text(f: &Formula, sig: &Signature) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, sig, IFF);
    s
}

fn write_formula(out: &mut String, f: &Formula, sig: &Signature, min: u8) {
    if level(f) < min {
        out.push('(');
        write_formula(out, f, sig, IFF);
        out.push(')');
        return;
    }
    match view(f) {
        View::Top => out.push_str("true"),
        View::Bottom => out.push_str("false"),
        View::Iff(a, b) => {
            write_formula(out, a, sig, IMP);
            out.push_str(" <-> ");
            write_formula(out, b, sig, IMP);
        }
        View::Imp(a, b) => {
            write_formula(out, a, sig, OR);
            out.push_str(" -> ");
            write_formula(out, b, sig, IMP);
        }
        View::Or(a, b) => {
            write_formula(out, a, sig, AND);
            out.push_str(" | ");
            write_formula(out, b, sig, OR);
        }
        View::And(a, b) => {
            write_formula(out, a, sig, ATOM);
            out.push_str(" & ");
            write_formula(out, b, sig, AND);
        }
        View::Not(a) => {
            out.push('!');
            write_formula(out, a, sig, ATOM);
        }
        View::Neq(a, b) => {
            write_term(out, a, sig);
            out.push_str(" != ");
            write_term(out, b, sig);
        }
        View::Exists(v, body) => {
            out.push_str("exists ");
            out.push_str(&var_text(v));
            let mut body = body;
            while let View::Exists(w, inner) = view(body) {
                out.push(' ');
                out.push_str(&var_text(w));
                body = inner;
            }
            out.push_str(" (");
            write_formula(out, body, sig, IFF);
            out.push(')');
        }
        View::Other => write_plain(out, f, sig),
    }
}

fn write_plain(out: &mut String, f: &Formula, sig: &Signature) {
    match f {
        Formula::Eq(a, b) => {
            write_term(out, a, sig);
            out.push_str(" = ");
            write_term(out, b, sig);
        }
        Formula::Forall(v, body) => {
            out.push_str("forall ");
            out.push_str(&var_text(v));
            let mut body: &Formula = body;
            while let Formula::Forall(w, inner) = body {
                out.push(' ');
                out.push_str(&var_text(w));
                body = inner;
            }
            out.push_str(" (");
            write_formula(out, body, sig, IFF);
            out.push(')');
        }
        Formula::In1 { set, func, args, value } => {
            let _ = write!(out, "{}({}, ", var_text(set), sig.name(*func));
            write_args(out, args, sig);
            out.push_str(", ");
            write_term(out, value, sig);
            out.push(')');
        }
        Formula::In2 { set, func, args, value, tag } => {
            let _ = write!(out, "{}({}, ", var_text(set), sig.name(*func));
            write_args(out, args, sig);
            out.push_str(", ");
            write_term(out, value, sig);
            out.push_str(", ");
            write_term(out, tag, sig);
            out.push(')');
        }
        Formula::Upd(r, x) => {
            out.push_str("upd(");
            write_block(out, r, sig);
            let _ = write!(out, ", {})", var_text(x));
        }
        Formula::Modal(x, body) => {
            let _ = write!(out, "[{}] ", var_text(x));
            write_formula(out, body, sig, ATOM);
        }
        Formula::Not(_) | Formula::And(..) => unreachable!("handled by view"),
    }
}

fn write_args(out: &mut String, args: &[Term], sig: &Signature) {
    if args.len() == 1 {
        write_term(out, &args[0], sig);
    } else {
        write_tuple(out, args, sig);
    }
}

pub fn rule_text(r: &Rule, sig: &Signature) -> String {
    let mut s = String::new();
    write_block(&mut s, r, sig);
    s
}

fn write_block(out: &mut String, r: &Rule, sig: &Signature) {
    match r {
        Rule::Par(a, b) => {
            write_rule_atom(out, a, sig, true);
            out.push(' ');
            write_block(out, b, sig);
        }
        _ => write_rule_atom(out, r, sig, false),
    }
}

fn write_rule_atom(out: &mut String, r: &Rule, sig: &Signature, in_block: bool) {
    match r {
        Rule::Update { func, args, value } => {
            out.push_str(sig.name(*func));
            if !args.is_empty() {
                write_tuple(out, args, sig);
            }
            out.push_str(" := ");
            write_term(out, value, sig);
        }
        Rule::If { guard, body } => {
            out.push_str("if ");
            write_formula(out, guard, sig, IFF);
            out.push_str(" then ");
            write_block(out, body, sig);
            out.push_str(" endif");
        }
        Rule::Forall { var, guard, body } | Rule::Choose { var, guard, body } => {
            out.push_str(if matches!(r, Rule::Forall { .. }) { "forall " } else { "choose " });
            out.push_str(&var_text(var));
            out.push_str(" with ");
            write_formula(out, guard, sig, IFF);
            out.push_str(" do ");
            write_block(out, body, sig);
            out.push_str(" enddo");
        }
        Rule::Par(..) => {
            let _ = in_block;
            out.push_str("par ");
            write_block(out, r, sig);
            out.push_str(" endpar");
        }
        Rule::Seq(..) => {
            out.push_str("seq");
            let mut cur = r;
            while let Rule::Seq(a, b) = cur {
                out.push(' ');
                write_rule_atom(out, a, sig, false);
                cur = b;
            }
            out.push(' ');
            write_rule_atom(out, cur, sig, false);
            out.push_str(" endseq");
        }
    }
}

/// Multi-line, indented rendering of a rule block for machine files.
pub fn rule_pretty(r: &Rule, sig: &Signature, indent: usize) -> String {
    let mut out = String::new();
    pretty_block(&mut out, r, sig, indent);
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn pretty_block(out: &mut String, r: &Rule, sig: &Signature, indent: usize) {
    match r {
        Rule::Par(a, b) => {
            pretty_atom(out, a, sig, indent);
            pretty_block(out, b, sig, indent);
        }
        _ => pretty_atom(out, r, sig, indent),
    }
}

fn pretty_atom(out: &mut String, r: &Rule, sig: &Signature, indent: usize) {
    pad(out, indent);
    match r {
        Rule::Update { .. } => write_rule_atom(out, r, sig, false),
        Rule::If { guard, body } => {
            out.push_str("if ");
            write_formula(out, guard, sig, IFF);
            out.push_str(" then\n");
            pretty_block(out, body, sig, indent + 1);
            pad(out, indent);
            out.push_str("endif");
        }
        Rule::Forall { var, guard, body } | Rule::Choose { var, guard, body } => {
            out.push_str(if matches!(r, Rule::Forall { .. }) { "forall " } else { "choose " });
            out.push_str(&var_text(var));
            out.push_str(" with ");
            write_formula(out, guard, sig, IFF);
            out.push_str(" do\n");
            pretty_block(out, body, sig, indent + 1);
            pad(out, indent);
            out.push_str("enddo");
        }
        Rule::Par(..) => {
            out.push_str("par\n");
            pretty_block(out, r, sig, indent + 1);
            pad(out, indent);
            out.push_str("endpar");
        }
        Rule::Seq(..) => {
            out.push_str("seq\n");
            let mut cur = r;
            while let Rule::Seq(a, b) = cur {
                pretty_atom(out, a, sig, indent + 1);
                cur = b;
            }
            pretty_atom(out, cur, sig, indent + 1);
            pad(out, indent);
            out.push_str("endseq");
        }
    }
    out.push('\n');
}

pub fn signature_text(sig: &Signature) -> String {
    let mut out = String::from("signature:\n");
    for f in sig.funcs().filter(|&f| !sig.is_builtin(f)) {
        let d = sig.decl(f);
        let _ = writeln!(
            out,
            "  function {}/{} {} {}",
            d.name,
            d.arity,
            d.kind.keyword(),
            if d.dynamic { "dynamic" } else { "static" }
        );
    }
    out
}

pub fn machine_text(m: &Machine) -> String {
    let sig = &m.signature;
    let mut out = signature_text(sig);
    out.push_str("rule:\n");
    out.push_str(&rule_pretty(&m.rule, sig, 1));
    if let StateSet::Formula(f) = &m.initial {
        let _ = writeln!(out, "initial: {}", formula_text(f, sig));
    }
    if let StateSet::Formula(f) = &m.final_states {
        let _ = writeln!(out, "final: {}", formula_text(f, sig));
    }
    out
}

pub fn formula_file_text(file: &FormulaFile) -> String {
    let mut out = signature_text(&file.signature);
    for f in &file.formulas {
        let _ = writeln!(out, "formula: {}", formula_text(f, &file.signature));
    }
    out
}

fn atoms_line(out: &mut String, univ: &Universe, sort: crate::model::Sort) {
    for e in univ.carrier(sort) {
        out.push(' ');
        out.push_str(univ.name(e));
    }
    out.push('\n');
}

/// Canonical state text: each function's most common value becomes its
/// default and only the other rows are listed.
pub fn state_text(s: &State) -> String {
    let sig = s.signature();
    let univ = s.universe();
    let mut out = String::from("primary-carrier:");
    atoms_line(&mut out, univ, crate::model::Sort::Primary);
    out.push_str("secondary-carrier:");
    atoms_line(&mut out, univ, crate::model::Sort::Secondary);
    out.push_str("functions:\n");
    for f in sig.funcs().filter(|&f| !sig.is_builtin(f)) {
        let d = sig.decl(f);
        let default = s.most_common_value(f);
        let _ = writeln!(
            out,
            "  function {}/{} {} {} default {}",
            d.name,
            d.arity,
            d.kind.keyword(),
            if d.dynamic { "dynamic" } else { "static" },
            univ.name(default)
        );
        for (args, v) in s.graph(f) {
            if v != default {
                let _ = writeln!(out, "    {} = {}", location_text(sig, univ, f, &args), univ.name(v));
            }
        }
    }
    out
}

pub fn location_text(sig: &Signature, univ: &Universe, f: crate::model::Func, args: &[Elem]) -> String {
    let mut out = String::from(sig.name(f));
    if !args.is_empty() {
        let names: Vec<&str> = args.iter().map(|&a| univ.name(a)).collect();
        let _ = write!(out, "({})", names.join(", "));
    }
    out
}

pub fn update_text(sig: &Signature, univ: &Universe, u: &Update) -> String {
    format!("{} := {}", location_text(sig, univ, u.loc.func, &u.loc.args), univ.name(u.value))
}

pub fn update_set_text(sig: &Signature, univ: &Universe, u: &UpdateSet) -> String {
    let items: Vec<String> = u.iter().map(|x| update_text(sig, univ, x)).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn family_text(sig: &Signature, univ: &Universe, fam: &Family) -> String {
    let items: Vec<String> = fam.iter().map(|u| update_set_text(sig, univ, u)).collect();
    format!("{{{}}}", items.join(", "))
}
