//! Abstract syntax, concrete syntax and structural operations.

pub mod ast;
pub mod derived;
pub mod lexer;
pub mod ops;
pub mod parser;
pub mod printer;

pub use ast::{Formula, Rule, Term, Var, VarSort};
pub use ops::{
    alpha_eq, check_formula, check_rule, is_closed, is_flat, is_membership_fragment, is_pure, is_static, sort_of,
    substitute, FreeVars, Fresh, Replacement,
};
pub use parser::{
    parse_bindings, parse_derivation, parse_formula, parse_lformula, parse_machine, parse_rule, parse_state,
    parse_term, FormulaFile, Machine, StateSet,
};
pub use printer::{formula_text, machine_text, rule_text, state_text};
