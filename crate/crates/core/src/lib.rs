//! Non-deterministic parallel abstract state machines over metafinite
//! states: update-set semantics, a one-step modal logic with predicate
//! variables over update sets, its translation into the membership fragment,
//! and a checker for Hilbert-style derivations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod logic;
pub mod model;
pub mod proof;
pub mod sample;
pub mod semantics;
pub mod syntax;
pub mod translate;

pub use error::{Error, Result};
pub use model::{Elem, Family, Func, FuncKind, Signature, Sort, State, Universe, Update, UpdateSet};
pub use semantics::{delta, run, successors, Limits, RunMode, RunReport, Valuation};
