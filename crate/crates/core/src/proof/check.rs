use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::schema::{certified_claim, check_rule_shape, closure};
use super::{instantiate_schema, Certificate, Derivation, Justification, MetaValue, SchemaId, Step};
use crate::error::Error;
use crate::logic::{eval, rules_equivalent};
use crate::model::State;
use crate::semantics::{Limits, Valuation};
use crate::syntax::ops::alpha_eq;
use crate::syntax::{is_closed, Formula, Var, VarSort};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineStatus {
    Ok,
    /// Accepted on an `axiomatic` certificate.
    OkModuloCertificates,
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineReport {
    pub label: usize,
    pub line: usize,
    pub status: LineStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Ok,
    OkModuloCertificates,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub lines: Vec<LineReport>,
}

impl CheckReport {
    pub fn verdict(&self) -> Verdict {
        self.lines
            .iter()
            .map(|l| match l.status {
                LineStatus::Ok => Verdict::Ok,
                LineStatus::OkModuloCertificates => Verdict::OkModuloCertificates,
                LineStatus::Rejected(_) => Verdict::Rejected,
            })
            .max()
            .unwrap_or(Verdict::Ok)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &LineReport> {
        self.lines.iter().filter(|l| matches!(l.status, LineStatus::Rejected(_)))
    }
}

/// Resolves a certificate state-file name to its states.
pub type Resolver<'a> = dyn FnMut(&str) -> Result<Vec<State>, String> + 'a;

struct Checker<'a, 'r> {
    d: &'a Derivation,
    hypotheses: &'a [Formula],
    resolve: &'a mut Resolver<'r>,
    limits: &'a Limits,
}

/// Checks every line. A rejected line is still available as a premise, so
/// each diagnostic points at the line that is actually wrong.
pub fn check(d: &Derivation, hypotheses: &[Formula], resolve: &mut Resolver<'_>, limits: &Limits) -> CheckReport {
    let mut c = Checker { d, hypotheses, resolve, limits };
    let mut lines = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let status = match c.step(i, step) {
            Ok(s) => s,
            Err(msg) => LineStatus::Rejected(msg),
        };
        lines.push(LineReport { label: step.label, line: step.line, status });
    }
    CheckReport { lines }
}

impl<'a, 'r> Checker<'a, 'r> {
    fn step(&mut self, i: usize, step: &Step) -> Result<LineStatus, String> {
        let earlier = &self.d.steps[..i];
        if let Some(prev) = earlier.last() {
            if step.label <= prev.label {
                return Err(format!("step number {} does not increase on {}", step.label, prev.label));
            }
        }
        crate::syntax::check_formula(&step.formula, &self.d.signature).map_err(|e| format!("{e}"))?;
        match &step.justification {
            Justification::Hypothesis => {
                if self.d.hypotheses.iter().chain(self.hypotheses).any(|h| alpha_eq(h, &step.formula)) {
                    Ok(LineStatus::Ok)
                } else {
                    Err("formula is not a hypothesis".into())
                }
            }
            Justification::Axiom { schema, inst, cert } => {
                let instance = instantiate_schema(*schema, inst, &self.d.signature).map_err(message)?;
                if !alpha_eq(&instance, &step.formula) {
                    return Err(format!("formula is not the stated instance of {}", schema.name()));
                }
                if !schema.needs_certificate() {
                    if cert.is_some() {
                        return Err(format!("axiom {} takes no certificate", schema.name()));
                    }
                    return Ok(LineStatus::Ok);
                }
                self.extensionality(*schema, inst, cert.as_ref())
            }
            Justification::Rule { rule, premises, inst, cert } => {
                if premises.len() != rule.premises() {
                    return Err(format!("{} takes {} premise(s), got {}", rule.name(), rule.premises(), premises.len()));
                }
                let mut prem = Vec::with_capacity(premises.len());
                for &p in premises {
                    match earlier.iter().find(|s| s.label == p) {
                        Some(s) => prem.push(&s.formula),
                        None => return Err(format!("premise {p} is not an earlier step")),
                    }
                }
                check_rule_shape(*rule, &prem, &step.formula, inst, &self.d.signature)?;
                if !rule.needs_certificate() {
                    if cert.is_some() {
                        return Err(format!("rule {} takes no certificate", rule.name()));
                    }
                    return Ok(LineStatus::Ok);
                }
                let claim = closure(&certified_claim(*rule, &prem, &step.formula));
                match cert {
                    None => Err(format!("rule {} needs a certificate", rule.name())),
                    Some(Certificate::Axiomatic) => Ok(LineStatus::OkModuloCertificates),
                    Some(Certificate::States(files)) => {
                        for file in files {
                            for (k, s) in self.states(file)?.iter().enumerate() {
                                match eval(&claim, s, &Valuation::new(), self.limits) {
                                    Ok(true) => {}
                                    Ok(false) => {
                                        return Err(format!(
                                            "certificate: side condition of {} fails on state {} of \"{file}\"",
                                            rule.name(),
                                            k + 1
                                        ))
                                    }
                                    Err(e) => return Err(format!("certificate: {e}")),
                                }
                            }
                        }
                        Ok(LineStatus::Ok)
                    }
                }
            }
        }
    }

    fn states(&mut self, file: &str) -> Result<Vec<State>, String> {
        let states = (self.resolve)(file).map_err(|e| format!("certificate \"{file}\": {e}"))?;
        if states.is_empty() {
            return Err(format!("certificate \"{file}\" names no states"));
        }
        for s in &states {
            if **s.signature() != *self.d.signature {
                return Err(format!("certificate \"{file}\": state signature differs from the derivation's"));
            }
        }
        Ok(states)
    }

    /// Discharges `r1 ≡ r2` for schema E.
    fn extensionality(
        &mut self,
        schema: SchemaId,
        inst: &super::Instantiation,
        cert: Option<&Certificate>,
    ) -> Result<LineStatus, String> {
        let (Some(MetaValue::Rule(r1)), Some(MetaValue::Rule(r2))) = (inst.get("r1"), inst.get("r2")) else {
            return Err(format!("{} needs rules r1 and r2", schema.name()));
        };
        let files = match cert {
            None => return Err(format!("axiom {} needs a certificate for r1 ≡ r2", schema.name())),
            Some(Certificate::Axiomatic) => return Ok(LineStatus::OkModuloCertificates),
            Some(Certificate::States(files)) => files,
        };
        for file in files {
            let states = self.states(file)?;
            let same = if is_closed(r1) && is_closed(r2) {
                rules_equivalent(r1, r2, &states, self.limits).map_err(message)?
            } else {
                let x = fresh_set(r1, r2);
                let def = closure(&Formula::forall(
                    x.clone(),
                    Formula::iff(Formula::upd(r1.clone(), x.clone()), Formula::upd(r2.clone(), x)),
                ));
                let mut all = true;
                for s in &states {
                    all &= eval(&def, s, &Valuation::new(), self.limits).map_err(message)?;
                }
                all
            };
            if !same {
                return Err(format!("certificate: r1 and r2 differ on a state of \"{file}\""));
            }
        }
        Ok(LineStatus::Ok)
    }
}

fn fresh_set(r1: &crate::syntax::Rule, r2: &crate::syntax::Rule) -> Var {
    let mut fresh = crate::syntax::Fresh::new();
    fresh.avoid_rule(r1);
    fresh.avoid_rule(r2);
    fresh.var("X", VarSort::Set)
}

fn message(e: Error) -> String {
    match e {
        Error::IllFormedInstantiation(m) => m,
        e => format!("{e}"),
    }
}
