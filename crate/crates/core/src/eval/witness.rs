//! Exact checking of `α_S(a⃗, c⃗)` with constructed witnesses.
//!
//! Instead of searching for the existential witnesses of `α_S` (sequence
//! codes are far too large to find by enumeration), the program is run and
//! the witnesses are read off the run: middle states for `;`, the branch
//! taken for `if`, and for every loop the iteration count `i` and the code
//! `w` of the visited states. The formula built by [`alpha`] is then walked
//! with those values plugged in, and every remaining quantifier-free piece is
//! checked with exact arithmetic. Coding predicates are checked through
//! their defining polynomial equations, with their own inner witnesses.

use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::arith_sem::{alpha, check_slots, default_outputs, SemError};
use crate::coding::{
    beta_matrix, beta_modulus, elem_matrix, pair_graph, seq_encode, seq_elem, tuple_encode,
    tuple_matrix, unpair,
};
use crate::interp::{eval_expr, exec, holds, ExecOutcome, State};
use crate::syntax::{nat_string, Atom, Coded, Expr, Formula, Nat, Stmt, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessTree {
    Assign,
    Seq {
        #[serde(with = "nat_vec")]
        mid: Vec<Nat>,
        first: Box<WitnessTree>,
        second: Box<WitnessTree>,
    },
    If {
        then_branch: bool,
        inner: Box<WitnessTree>,
    },
    While {
        iterations: usize,
        #[serde(with = "nat_string")]
        code: Nat,
        #[serde(with = "nat_rows")]
        states: Vec<Vec<Nat>>,
        steps: Vec<WitnessTree>,
    },
}

mod nat_vec {
    use super::Nat;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Nat], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|n| n.to_str_radix(10)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Nat>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| Nat::parse_bytes(t.as_bytes(), 10).ok_or_else(|| D::Error::custom("invalid numeral")))
            .collect()
    }
}

mod nat_rows {
    use super::Nat;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Nat>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(|n| n.to_str_radix(10)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Nat>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| Nat::parse_bytes(t.as_bytes(), 10).ok_or_else(|| D::Error::custom("invalid numeral")))
                    .collect()
            })
            .collect()
    }
}

impl WitnessTree {
    /// Largest number appearing in the tree.
    pub fn max_value(&self) -> Nat {
        match self {
            WitnessTree::Assign => Nat::default(),
            WitnessTree::Seq { mid, first, second } => mid
                .iter()
                .cloned()
                .chain([first.max_value(), second.max_value()])
                .max()
                .unwrap_or_default(),
            WitnessTree::If { inner, .. } => inner.max_value(),
            WitnessTree::While { iterations, code, states, steps } => states
                .iter()
                .flatten()
                .cloned()
                .chain(steps.iter().map(|t| t.max_value()))
                .chain([code.clone(), Nat::from(*iterations)])
                .max()
                .unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("witness rejected at {path}: {reason}")]
    Rejected { path: String, reason: String },
}

/// Runs `s`, which must terminate, recording the witnesses of `α_S`.
fn build(s: &Stmt, xs: &[Var], w: &mut State) -> WitnessTree {
    match s {
        Stmt::Assign(x, e) => {
            let v = eval_expr(e, w);
            w.set(*x, v);
            WitnessTree::Assign
        }
        Stmt::Seq(a, b) => {
            let first = build(a, xs, w);
            let mid = w.slots(xs);
            let second = build(b, xs, w);
            WitnessTree::Seq { mid, first: Box::new(first), second: Box::new(second) }
        }
        Stmt::If(g, a, b) => {
            let then_branch = holds(g, w);
            let inner = build(if then_branch { a } else { b }, xs, w);
            WitnessTree::If { then_branch, inner: Box::new(inner) }
        }
        Stmt::While(g, body) => {
            let mut states = vec![w.slots(xs)];
            let mut steps = Vec::new();
            while holds(g, w) {
                steps.push(build(body, xs, w));
                states.push(w.slots(xs));
            }
            let codes: Vec<Nat> =
                states.iter().map(|st| tuple_encode(st).expect("at least one slot")).collect();
            let code = seq_encode(&codes).expect("a loop visits at least one state");
            WitnessTree::While { iterations: steps.len(), code, states, steps }
        }
    }
}

struct Walker {
    env: State,
}

type Check = Result<(), (String, String)>;

fn reject<T>(path: &str, reason: impl Into<String>) -> Result<T, (String, String)> {
    Err((path.to_string(), reason.into()))
}

fn num(n: &Nat) -> Expr {
    Expr::num(n.clone())
}

fn peel<'f>(mut f: &'f Formula, n: usize, path: &str) -> Result<(Vec<Var>, &'f Formula), (String, String)> {
    let mut vs = Vec::with_capacity(n);
    for _ in 0..n {
        match f {
            Formula::Exists(v, body) => {
                vs.push(*v);
                f = body;
            }
            _ => return reject(path, "expected an existential quantifier"),
        }
    }
    Ok((vs, f))
}

fn split_and<'f>(f: &'f Formula, path: &str) -> Result<(&'f Formula, &'f Formula), (String, String)> {
    match f {
        Formula::And(a, b) => Ok((a, b)),
        _ => reject(path, "expected a conjunction"),
    }
}

impl Walker {
    fn bind(&mut self, vs: &[Var], values: &[Nat]) {
        for (v, n) in vs.iter().zip(values) {
            self.env.set(*v, n.clone());
        }
    }

    fn value(&self, e: &Expr) -> Nat {
        eval_expr(e, &self.env)
    }

    /// Exact truth of a quantifier-free formula; coding predicates are
    /// checked through their defining equations.
    fn holds(&self, f: &Formula, path: &str) -> Result<bool, (String, String)> {
        Ok(match f {
            Formula::Atom(Atom::Less(a, b)) => self.value(a) < self.value(b),
            Formula::Atom(Atom::Eq(a, b)) => self.value(a) == self.value(b),
            Formula::Not(a) => !self.holds(a, path)?,
            Formula::And(a, b) => self.holds(a, path)? && self.holds(b, path)?,
            Formula::Or(a, b) => self.holds(a, path)? || self.holds(b, path)?,
            Formula::Imp(a, b) => !self.holds(a, path)? || self.holds(b, path)?,
            Formula::Iff(a, b) => self.holds(a, path)? == self.holds(b, path)?,
            Formula::Coded(c) => self.holds(&self.instantiate(c), path)?,
            _ => return reject(path, "unexpected quantifier"),
        })
    }

    /// The quantifier-free matrix of a coding predicate with its inner
    /// witnesses computed from the argument values.
    fn instantiate(&self, c: &Coded) -> Formula {
        match c {
            Coded::Pair { left, right, code } => {
                pair_graph(&num(&self.value(left)), &num(&self.value(right)), &num(&self.value(code)))
            }
            Coded::Beta { s, t, index, value } => {
                let (sv, tv, iv) = (self.value(s), self.value(t), self.value(index));
                let q = &sv / beta_modulus(&tv, &iv);
                beta_matrix(&num(&sv), &num(&tv), &num(&iv), &num(&self.value(value)), &num(&q))
            }
            Coded::Elem { code, index, value } => {
                let (cv, iv) = (self.value(code), self.value(index));
                let (s, t) = unpair(&cv);
                let q = &s / beta_modulus(&t, &iv);
                elem_matrix(&num(&cv), &num(&iv), &num(&self.value(value)), &num(&s), &num(&t), &num(&q))
            }
            Coded::Tuple { code, parts } => {
                let vals: Vec<Nat> = parts.iter().map(|p| self.value(p)).collect();
                let n = vals.len();
                let rs: Vec<Expr> = (1..n.saturating_sub(1))
                    .map(|k| num(&tuple_encode(&vals[k..]).expect("nonempty")))
                    .collect();
                let us: Vec<Expr> = vals.iter().map(num).collect();
                tuple_matrix(&num(&self.value(code)), &us, &rs)
            }
        }
    }

    fn require(&self, f: &Formula, path: &str, what: &str) -> Check {
        if self.holds(f, path)? {
            Ok(())
        } else {
            reject(path, format!("{what} does not hold"))
        }
    }

    /// `(w)_j` decodes to a tuple, with the decode variable set to its code.
    fn elem_tuple(&mut self, f: &Formula, path: &str) -> Check {
        match f {
            Formula::Coded(Coded::Elem { .. }) => self.require(f, path, "sequence element"),
            Formula::Exists(d, body) => {
                let (elem, tuple) = split_and(body, path)?;
                let Formula::Coded(Coded::Elem { code, index, .. }) = elem else {
                    return reject(path, "expected an element predicate");
                };
                let dv = seq_elem(&self.value(code), &self.value(index));
                self.env.set(*d, dv);
                self.require(elem, path, "sequence element")?;
                self.require(tuple, path, "tuple decoding")
            }
            _ => reject(path, "expected a decoded sequence element"),
        }
    }

    fn walk(&mut self, f: &Formula, s: &Stmt, t: &WitnessTree, n: usize, path: &str) -> Check {
        match (s, t) {
            (Stmt::Assign(..), WitnessTree::Assign) => self.require(f, path, "assignment"),
            (Stmt::Seq(a, b), WitnessTree::Seq { mid, first, second }) => {
                let (zs, body) = peel(f, n, path)?;
                self.bind(&zs, mid);
                let (fa, fb) = split_and(body, path)?;
                self.walk(fa, a, first, n, &format!("{path}.0"))?;
                self.walk(fb, b, second, n, &format!("{path}.1"))
            }
            (Stmt::If(_, a, b), WitnessTree::If { then_branch, inner }) => {
                let Formula::Or(l, r) = f else {
                    return reject(path, "expected a disjunction");
                };
                let (guard, rest) = split_and(if *then_branch { l } else { r }, path)?;
                self.require(guard, path, "branch condition")?;
                let (sub, tag) = if *then_branch { (a, "then") } else { (b, "else") };
                self.walk(rest, sub, inner, n, &format!("{path}.{tag}"))
            }
            (Stmt::While(_, body), WitnessTree::While { iterations, code, states, steps }) => {
                if states.len() != iterations + 1 || steps.len() != *iterations {
                    return reject(path, "inconsistent iteration count");
                }
                let (run, exit) = split_and(f, path)?;
                let (iw, inner) = peel(run, 2, path)?;
                self.bind(&iw, &[Nat::from(*iterations), code.clone()]);
                let (start, rest) = split_and(inner, path)?;
                let (all_steps, end) = split_and(rest, path)?;
                self.elem_tuple(start, &format!("{path}.start"))?;
                let Formula::BoundedForall(j, bound, step) = all_steps else {
                    return reject(path, "expected a bounded quantifier over iterations");
                };
                if self.value(bound) != Nat::from(*iterations) {
                    return reject(path, "iteration bound mismatch");
                }
                for k in 0..*iterations {
                    let here = format!("{path}.iter{k}");
                    self.env.set(*j, Nat::from(k));
                    let (uvs, conj) = peel(step, 2 * n, &here)?;
                    self.bind(&uvs[..n], &states[k]);
                    self.bind(&uvs[n..], &states[k + 1]);
                    let (at_j, rest) = split_and(conj, &here)?;
                    let (at_next, rest) = split_and(rest, &here)?;
                    let (guard, inner) = split_and(rest, &here)?;
                    self.elem_tuple(at_j, &here)?;
                    self.elem_tuple(at_next, &here)?;
                    self.require(guard, &here, "loop condition")?;
                    self.walk(inner, body, &steps[k], n, &here)?;
                }
                self.elem_tuple(end, &format!("{path}.end"))?;
                self.require(exit, path, "negated loop condition")
            }
            _ => reject(path, "witness does not match the program shape"),
        }
    }
}

fn check_dims(xs: &[Var], v: &[Nat]) -> Result<(), WitnessError> {
    if v.len() != xs.len() {
        return Err(WitnessError::DimensionMismatch { expected: xs.len(), got: v.len() });
    }
    Ok(())
}

/// Verifies `α_S(a⃗, c⃗)` against an explicit witness tree.
pub fn verify_witness(
    s: &Stmt,
    xs: &[Var],
    a: &[Nat],
    c: &[Nat],
    tree: &WitnessTree,
) -> Result<(), WitnessError> {
    check_slots(s, xs)?;
    check_dims(xs, a)?;
    check_dims(xs, c)?;
    let ys = default_outputs(xs);
    let formula = alpha(s, xs, &ys)?.formula;
    let mut env = State::from_slots(xs, a);
    for (y, v) in ys.iter().zip(c) {
        env.set(*y, v.clone());
    }
    Walker { env }
        .walk(&formula, s, tree, xs.len(), "root")
        .map_err(|(path, reason)| WitnessError::Rejected { path, reason })
}

/// `True` with witnesses iff `s` run from `a⃗` stops within `fuel` at `c⃗`;
/// `False` if it stops elsewhere; `Unknown` if fuel runs out.
pub fn check_alpha_witness(
    s: &Stmt,
    xs: &[Var],
    a: &[Nat],
    c: &[Nat],
    fuel: u64,
) -> Result<(Verdict, Option<WitnessTree>), WitnessError> {
    check_slots(s, xs)?;
    check_dims(xs, a)?;
    check_dims(xs, c)?;
    let start = State::from_slots(xs, a);
    match exec(s, &start, fuel) {
        ExecOutcome::OutOfFuel => Ok((Verdict::Unknown, None)),
        ExecOutcome::Terminated { state, .. } if state.slots(xs) != c => Ok((Verdict::False, None)),
        ExecOutcome::Terminated { .. } => {
            let tree = build(s, xs, &mut start.clone());
            verify_witness(s, xs, a, c, &tree)?;
            Ok((Verdict::True, Some(tree)))
        }
    }
}
