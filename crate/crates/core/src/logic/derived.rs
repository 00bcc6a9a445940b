//! The consistency predicates computed directly from Δ, without going
//! through their defining formulas.

use crate::error::Result;
use crate::model::{State, UpdateSet};
use crate::semantics::{delta, Limits, Valuation};
use crate::syntax::Rule;

/// conUSet: no location receives two values.
pub fn con_uset(u: &UpdateSet) -> bool {
    u.is_consistent()
}

/// con(r,X): X is a consistent member of Δ(r).
pub fn con(r: &Rule, x: &UpdateSet, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    Ok(x.is_consistent() && delta(r, s, val, limits)?.contains(x))
}

/// wcon(r): some member of Δ(r) is consistent.
pub fn wcon(r: &Rule, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    Ok(delta(r, s, val, limits)?.iter().any(UpdateSet::is_consistent))
}

/// scon(r): every member of Δ(r) is consistent.
pub fn scon(r: &Rule, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    Ok(delta(r, s, val, limits)?.iter().all(UpdateSet::is_consistent))
}

/// joinable(r1,r2): some Δ1 ∈ Δ(r1), Δ2 ∈ Δ(r2) never give one location
/// two different values across the pair.
pub fn joinable(r1: &Rule, r2: &Rule, s: &State, val: &Valuation, limits: &Limits) -> Result<bool> {
    let f1 = delta(r1, s, val, limits)?;
    let f2 = delta(r2, s, val, limits)?;
    let found = f1.iter().any(|d1| {
        f2.iter().any(|d2| d1.iter().all(|u1| d2.iter().all(|u2| u1.loc != u2.loc || u1.value == u2.value)))
    });
    Ok(found)
}

/// Δ(r1,S) = Δ(r2,S) on each given state.
pub fn rules_equivalent(r1: &Rule, r2: &Rule, states: &[State], limits: &Limits) -> Result<bool> {
    for s in states {
        let v = Valuation::new();
        if delta(r1, s, &v, limits)? != delta(r2, s, &v, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}
