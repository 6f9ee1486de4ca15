//! Derivations of `{p} S {SP(p, S)}` by recursion on `S`.

use super::Derivation;
use crate::arith_sem::{check_slots, SemError};
use crate::sp::{build, invariant_formula};
use crate::syntax::{Formula, Stmt, Var};

/// A derivation concluding `{p} S {SP(p,S)(xs)}`, with `SP` exactly as
/// built by [`crate::sp::sp`].
pub fn generate_sp_derivation(p: &Formula, s: &Stmt, xs: &[Var]) -> Result<Derivation, SemError> {
    check_slots(s, xs)?;
    Ok(derive(p, s, xs))
}

fn derive(p: &Formula, s: &Stmt, xs: &[Var]) -> Derivation {
    match s {
        Stmt::Assign(x, e) => {
            // Forward assignment through the backward axiom:
            // p → SP[e/x],  {SP[e/x]} x := e {SP},  SP → SP.
            let q = build(p, s, xs);
            Derivation::conseq(p.clone(), Derivation::assign(q.clone(), *x, e.clone()), q)
        }
        Stmt::Seq(a, b) => {
            let mid = build(p, a, xs);
            let left = derive(p, a, xs);
            let right = derive(&mid, b, xs);
            Derivation::comp(left, right, mid)
        }
        Stmt::If(g, a, b) => {
            let q = build(p, s, xs);
            let gf = g.to_formula();
            let p_then = Formula::and(p.clone(), gf.clone());
            let p_else = Formula::and(p.clone(), Formula::not(gf));
            let then_d = Derivation::conseq(p_then.clone(), derive(&p_then, a, xs), q.clone());
            let else_d = Derivation::conseq(p_else.clone(), derive(&p_else, b, xs), q);
            Derivation::cond(then_d, else_d)
        }
        Stmt::While(g, body) => {
            let inv = invariant_formula(p, g, body, xs);
            let entry = Formula::and(inv.clone(), g.to_formula());
            let body_d = Derivation::conseq(entry.clone(), derive(&entry, body, xs), inv.clone());
            let q = build(p, s, xs);
            Derivation::conseq(p.clone(), Derivation::iter(body_d), q)
        }
    }
}
