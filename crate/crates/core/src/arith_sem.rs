//! The formula `α_S(x⃗, y⃗)` defining the input/output function of a program.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::syntax::{program_vars, BExpr, Coded, Expr, Formula, FreshGen, Stmt, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemError {
    #[error("{0} occurs in the program but is not among the listed variables")]
    MissingSlot(Var),
    #[error("{0} is listed twice")]
    Duplicate(Var),
    #[error("{0} is used both as an input and as an output variable")]
    NotDisjoint(Var),
    #[error("expected {expected} output variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("component {index} is out of range 1..={arity}")]
    IndexRange { index: usize, arity: usize },
    #[error("at least one program variable is required")]
    NoVariables,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub formula: Formula,
    pub in_vars: Vec<Var>,
    pub out_vars: Vec<Var>,
}

pub(crate) fn check_slots(s: &Stmt, xs: &[Var]) -> Result<(), SemError> {
    if xs.is_empty() {
        return Err(SemError::NoVariables);
    }
    let mut seen = BTreeSet::new();
    for x in xs {
        if !seen.insert(*x) {
            return Err(SemError::Duplicate(*x));
        }
    }
    match program_vars(s).into_iter().find(|v| !seen.contains(v)) {
        Some(v) => Err(SemError::MissingSlot(v)),
        None => Ok(()),
    }
}

fn var_exprs(vs: &[Var]) -> Vec<Expr> {
    vs.iter().map(|v| Expr::Var(*v)).collect()
}

/// `(w)_j` decodes to the tuple `us`: `∃d ((w)_j = d ∧ d = ⟨u1,…,un⟩)`,
/// or just `(w)_j = u1` for a single slot.
pub fn elem_tuple(w: &Expr, j: &Expr, us: &[Var], fresh: &mut FreshGen) -> Formula {
    if let [u] = us {
        return Formula::Coded(Coded::Elem { code: w.clone(), index: j.clone(), value: Expr::Var(*u) });
    }
    let d = fresh.var();
    Formula::exists(
        d,
        Formula::and(
            Formula::Coded(Coded::Elem { code: w.clone(), index: j.clone(), value: Expr::Var(d) }),
            Formula::Coded(Coded::Tuple { code: Expr::Var(d), parts: var_exprs(us) }),
        ),
    )
}

/// The guard `b` read at the slots `us` instead of `xs`.
pub(crate) fn guard_at(b: &BExpr, xs: &[Var], us: &[Var]) -> Formula {
    b.to_formula().rename(xs, us)
}

struct Builder<'a> {
    xs: &'a [Var],
    fresh: FreshGen,
}

impl Builder<'_> {
    fn build(&mut self, s: &Stmt, ins: &[Var], outs: &[Var]) -> Formula {
        match s {
            Stmt::Assign(x, e) => {
                let i = self.xs.iter().position(|v| v == x).expect("slots checked");
                let e = e.substitute(&self.xs.iter().copied().zip(var_exprs(ins)).collect());
                let mut parts = vec![Formula::eq(Expr::Var(outs[i]), e)];
                for (j, (o, u)) in outs.iter().zip(ins).enumerate() {
                    if j != i {
                        parts.push(Formula::eq(Expr::Var(*o), Expr::Var(*u)));
                    }
                }
                Formula::conj(parts)
            }
            Stmt::Seq(a, b) => {
                let zs = self.fresh.vars(self.xs.len());
                let first = self.build(a, ins, &zs);
                let second = self.build(b, &zs, outs);
                Formula::exists_many(&zs, Formula::and(first, second))
            }
            Stmt::If(g, a, b) => {
                let guard = guard_at(g, self.xs, ins);
                let then_part = Formula::and(guard.clone(), self.build(a, ins, outs));
                let else_part = Formula::and(Formula::not(guard), self.build(b, ins, outs));
                Formula::or(then_part, else_part)
            }
            Stmt::While(g, body) => {
                let i = self.fresh.var();
                let w = self.fresh.var();
                let j = self.fresh.var();
                let us = self.fresh.vars(self.xs.len());
                let vs = self.fresh.vars(self.xs.len());
                let (we, je, ie) = (Expr::Var(w), Expr::Var(j), Expr::Var(i));
                let step = {
                    let at_j = elem_tuple(&we, &je, &us, &mut self.fresh);
                    let next = Expr::add(je.clone(), Expr::One);
                    let at_next = elem_tuple(&we, &next, &vs, &mut self.fresh);
                    let inner = self.build(body, &us, &vs);
                    let mut quantified = us.clone();
                    quantified.extend_from_slice(&vs);
                    Formula::exists_many(
                        &quantified,
                        Formula::conj([at_j, at_next, guard_at(g, self.xs, &us), inner]),
                    )
                };
                let start = elem_tuple(&we, &Expr::Zero, ins, &mut self.fresh);
                let end = elem_tuple(&we, &ie, outs, &mut self.fresh);
                let all_steps = Formula::BoundedForall(j, ie, Box::new(step));
                let run = Formula::exists_many(&[i, w], Formula::conj([start, all_steps, end]));
                Formula::and(run, Formula::not(guard_at(g, self.xs, outs)))
            }
        }
    }
}

/// Builds `α_S(xs, ys)`; auxiliary variables are drawn above `xs ∪ ys`.
pub fn alpha(s: &Stmt, xs: &[Var], ys: &[Var]) -> Result<AlphaResult, SemError> {
    check_slots(s, xs)?;
    if ys.len() != xs.len() {
        return Err(SemError::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let mut seen = BTreeSet::new();
    for y in ys {
        if xs.contains(y) {
            return Err(SemError::NotDisjoint(*y));
        }
        if !seen.insert(*y) {
            return Err(SemError::Duplicate(*y));
        }
    }
    let max = xs.iter().chain(ys).map(|v| v.0).max();
    let mut b = Builder { xs, fresh: FreshGen::above(max) };
    let formula = b.build(s, xs, ys);
    Ok(AlphaResult { formula, in_vars: xs.to_vec(), out_vars: ys.to_vec() })
}

/// Output variables for `α_S` chosen just above `xs`.
pub fn default_outputs(xs: &[Var]) -> Vec<Var> {
    crate::syntax::fresh_vars(xs, xs.len())
}

/// `α_S^{(i)}(x⃗, y)`: every output slot but the `index`-th (1-based) is
/// existentially projected away.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaComponent {
    pub formula: Formula,
    pub in_vars: Vec<Var>,
    pub out_var: Var,
}

pub fn alpha_component(s: &Stmt, xs: &[Var], index: usize) -> Result<AlphaComponent, SemError> {
    if index == 0 || index > xs.len() {
        return Err(SemError::IndexRange { index, arity: xs.len() });
    }
    let ys = default_outputs(xs);
    let full = alpha(s, xs, &ys)?;
    let others: Vec<Var> =
        ys.iter().enumerate().filter(|(k, _)| *k != index - 1).map(|(_, y)| *y).collect();
    Ok(AlphaComponent {
        formula: Formula::exists_many(&others, full.formula),
        in_vars: xs.to_vec(),
        out_var: ys[index - 1],
    })
}

/// Builds `α_S` over `program_vars(S)` with default outputs.
pub fn alpha_default(s: &Stmt) -> Result<AlphaResult, SemError> {
    let xs = program_vars(s);
    alpha(s, &xs, &default_outputs(&xs))
}
