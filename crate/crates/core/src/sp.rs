//! The formula `SP(p, S)` defining the strongest postcondition of `p`
//! under `S`, and the right-hand side of its characterization through `α_S`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith_sem::{alpha, check_slots, elem_tuple, SemError};
use crate::syntax::{BExpr, Expr, Formula, FreshGen, Stmt, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpResult {
    pub formula: Formula,
    pub vars: Vec<Var>,
}

fn fresh_for(p: &Formula, s: Option<&Stmt>, xs: &[Var]) -> FreshGen {
    let mut used = p.all_vars();
    used.extend(xs.iter().copied());
    if let Some(s) = s {
        s.collect_vars(&mut used);
    }
    FreshGen::from_sets([&used])
}

fn var_exprs(vs: &[Var]) -> Vec<Expr> {
    vs.iter().map(|v| Expr::Var(*v)).collect()
}

/// Builds `SP(p, S)(xs)`. Free variables of `p` outside `xs` are carried
/// through unchanged.
pub fn sp(p: &Formula, s: &Stmt, xs: &[Var]) -> Result<SpResult, SemError> {
    check_slots(s, xs)?;
    Ok(SpResult { formula: build(p, s, xs), vars: xs.to_vec() })
}

pub(crate) fn build(p: &Formula, s: &Stmt, xs: &[Var]) -> Formula {
    match s {
        Stmt::Assign(x, e) => {
            let mut fresh = fresh_for(p, Some(s), xs);
            let us = fresh.vars(xs.len());
            let ue = var_exprs(&us);
            let i = xs.iter().position(|v| v == x).expect("slots checked");
            let e = e.substitute(&xs.iter().copied().zip(ue.iter().cloned()).collect());
            let mut parts = vec![p.subst_vars(xs, &ue), Formula::eq(Expr::Var(*x), e)];
            for (j, (xj, uj)) in xs.iter().zip(&ue).enumerate() {
                if j != i {
                    parts.push(Formula::eq(Expr::Var(*xj), uj.clone()));
                }
            }
            Formula::exists_many(&us, Formula::conj(parts))
        }
        Stmt::Seq(a, b) => {
            let mid = build(p, a, xs);
            build(&mid, b, xs)
        }
        Stmt::If(g, a, b) => {
            let gf = g.to_formula();
            let then_part = build(&Formula::and(p.clone(), gf.clone()), a, xs);
            let else_part = build(&Formula::and(p.clone(), Formula::not(gf)), b, xs);
            Formula::or(then_part, else_part)
        }
        Stmt::While(g, body) => {
            let inv = invariant_formula(p, g, body, xs);
            Formula::and(inv, Formula::not(g.to_formula()))
        }
    }
}

/// The loop invariant `INV(p, b, S0)(xs)`: `xs` is reached from a state
/// satisfying `p` after some number of iterations of `S0` under `b`.
pub fn invariant(p: &Formula, b: &BExpr, body: &Stmt, xs: &[Var]) -> Result<Formula, SemError> {
    check_slots(&Stmt::while_(b.clone(), body.clone()), xs)?;
    Ok(invariant_formula(p, b, body, xs))
}

pub(crate) fn invariant_formula(p: &Formula, b: &BExpr, body: &Stmt, xs: &[Var]) -> Formula {
    let whole = Stmt::while_(b.clone(), body.clone());
    let mut fresh = fresh_for(p, Some(&whole), xs);
    let i = fresh.var();
    let w = fresh.var();
    let j = fresh.var();
    let us = fresh.vars(xs.len());
    let (we, je, ie) = (Expr::Var(w), Expr::Var(j), Expr::Var(i));

    let start = Formula::exists_many(
        &us,
        Formula::and(elem_tuple(&we, &Expr::Zero, &us, &mut fresh), p.subst_vars(xs, &var_exprs(&us))),
    );

    // SP(xs = (w)_j ∧ b, S0), then read at the decoded (j+1)-th tuple.
    let at_j = elem_tuple(&we, &je, xs, &mut fresh);
    let step_pre = Formula::and(at_j, b.to_formula());
    let step_post = build(&step_pre, body, xs);
    let mut above: BTreeSet<Var> = step_post.all_vars();
    above.insert(Var(fresh.floor()));
    let mut fresh = FreshGen::from_sets([&above]);
    let vs = fresh.vars(xs.len());
    let next = Expr::add(je.clone(), Expr::One);
    let step = Formula::exists_many(
        &vs,
        Formula::and(
            elem_tuple(&we, &next, &vs, &mut fresh),
            step_post.rename(xs, &vs),
        ),
    );
    let end = elem_tuple(&we, &ie, xs, &mut fresh);
    Formula::exists_many(
        &[i, w],
        Formula::conj([start, Formula::BoundedForall(j, ie.clone(), Box::new(step)), end]),
    )
}

/// `∃u⃗ (p(u⃗/x⃗) ∧ α_S(u⃗/x⃗, x⃗/y⃗))`.
pub fn separation_rhs(p: &Formula, s: &Stmt, xs: &[Var]) -> Result<Formula, SemError> {
    check_slots(s, xs)?;
    let mut fresh = fresh_for(p, Some(s), xs);
    let ys = fresh.vars(xs.len());
    let a = alpha(s, xs, &ys)?;
    let mut used = a.formula.all_vars();
    used.extend(p.all_vars());
    used.extend(ys.iter().copied());
    let us = FreshGen::from_sets([&used]).vars(xs.len());
    let ue = var_exprs(&us);
    let mut sigma: crate::syntax::Subst = xs.iter().copied().zip(ue.iter().cloned()).collect();
    sigma.extend(ys.iter().copied().zip(var_exprs(xs)));
    let body = Formula::and(p.subst_vars(xs, &ue), a.formula.substitute(&sigma));
    Ok(Formula::exists_many(&us, body))
}
