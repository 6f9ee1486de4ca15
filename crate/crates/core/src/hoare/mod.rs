//! Hoare derivations over the six rules of partial correctness: the
//! assignment axiom, composition, conditional, iteration, consequence, and
//! arithmetic truths as axioms.
//!
//! Rule shapes are checked exactly, up to renaming of bound variables. The
//! side conditions of the consequence rule become obligations, which are
//! discharged by truth in ℕ: a propositional tautology or a `True` verdict
//! discharges, a `False` verdict refutes, and `Unknown` is reported back.

mod generate;
mod smt;
mod text;
mod triple;

use serde::{Deserialize, Serialize};

use crate::eval::{Evaluator, Verdict};
use crate::interp::State;
use crate::syntax::{alpha_eq, BExpr, Expr, Formula, Stmt, Triple, Var};

pub use generate::generate_sp_derivation;
pub use smt::{obligation_to_smt2, formula_to_smt};
pub use triple::{
    box_states, check_triple_bounded, instantiate_induction, pa_axioms, Counterexample, PaAxioms, TripleCheck,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum Derivation {
    /// `{post[expr/var]} var := expr {post}`.
    AssignAxiom {
        #[serde(with = "text::formula")]
        post: Formula,
        #[serde(with = "text::var")]
        var: Var,
        #[serde(with = "text::expr")]
        expr: Expr,
    },
    Comp {
        left: Box<Derivation>,
        right: Box<Derivation>,
        #[serde(with = "text::formula")]
        mid: Formula,
    },
    /// Premises `{p ∧ b} S1 {q}` and `{p ∧ ¬b} S2 {q}`; `p` and `b` are read
    /// off the first premise.
    Cond {
        then_d: Box<Derivation>,
        else_d: Box<Derivation>,
    },
    /// Premise `{p ∧ b} S0 {p}`.
    Iter { body_d: Box<Derivation> },
    Conseq {
        #[serde(with = "text::formula")]
        pre: Formula,
        inner: Box<Derivation>,
        #[serde(with = "text::formula")]
        post: Formula,
    },
}

impl Derivation {
    pub fn assign(post: Formula, var: Var, expr: Expr) -> Self {
        Derivation::AssignAxiom { post, var, expr }
    }

    pub fn comp(left: Derivation, right: Derivation, mid: Formula) -> Self {
        Derivation::Comp { left: Box::new(left), right: Box::new(right), mid }
    }

    pub fn cond(then_d: Derivation, else_d: Derivation) -> Self {
        Derivation::Cond { then_d: Box::new(then_d), else_d: Box::new(else_d) }
    }

    pub fn iter(body_d: Derivation) -> Self {
        Derivation::Iter { body_d: Box::new(body_d) }
    }

    pub fn conseq(pre: Formula, inner: Derivation, post: Formula) -> Self {
        Derivation::Conseq { pre, inner: Box::new(inner), post }
    }

    /// The concluded triple, or the first rule violation.
    pub fn conclusion(&self) -> Result<Triple, RuleError> {
        Checker::default().node(self, "root")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Derivation::AssignAxiom { .. } => 0,
            Derivation::Comp { left, right, .. } => left.size() + right.size(),
            Derivation::Cond { then_d, else_d } => then_d.size() + else_d.size(),
            Derivation::Iter { body_d } => body_d.size(),
            Derivation::Conseq { inner, .. } => inner.size(),
        }
    }
}

/// A consequence-rule side condition, universally closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obligation {
    #[serde(with = "text::formula")]
    pub formula: Formula,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[error("{path}: {reason}")]
pub struct RuleError {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CheckOutcome {
    Valid,
    Invalid { reason: String, path: String },
    ValidModuloObligations { obligations: Vec<Obligation> },
}

/// How one obligation was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discharge {
    /// Propositionally valid, or both sides identical up to bound renaming.
    Tautology,
    Evaluated(Verdict),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub outcome: CheckOutcome,
    pub conclusion: Option<Triple>,
    pub obligations: Vec<(Obligation, Discharge)>,
}

#[derive(Default)]
struct Checker {
    obligations: Vec<(Obligation, Formula, Formula)>,
}

fn rule_error<T>(path: &str, reason: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError { path: path.to_string(), reason: reason.into() })
}

/// Splits `p ∧ b` with `b` quantifier-free.
fn split_guard<'f>(f: &'f Formula, path: &str, what: &str) -> Result<(&'f Formula, &'f Formula, BExpr), RuleError> {
    let Formula::And(p, b) = f else {
        return rule_error(path, format!("{what} precondition is not a conjunction with the condition"));
    };
    match BExpr::try_from(&**b) {
        Ok(g) => Ok((p, b, g)),
        Err(_) => rule_error(path, format!("{what} condition is not quantifier-free")),
    }
}

impl Checker {
    fn node(&mut self, d: &Derivation, path: &str) -> Result<Triple, RuleError> {
        match d {
            Derivation::AssignAxiom { post, var, expr } => {
                let sigma = [(*var, expr.clone())].into_iter().collect();
                Ok(Triple {
                    pre: post.substitute(&sigma),
                    prog: Stmt::assign(*var, expr.clone()),
                    post: post.clone(),
                })
            }
            Derivation::Comp { left, right, mid } => {
                let l = self.node(left, &format!("{path}.left"))?;
                let r = self.node(right, &format!("{path}.right"))?;
                if !alpha_eq(&l.post, mid) {
                    return rule_error(path, "postcondition of the first part differs from the middle assertion");
                }
                if !alpha_eq(&r.pre, mid) {
                    return rule_error(path, "precondition of the second part differs from the middle assertion");
                }
                Ok(Triple { pre: l.pre, prog: Stmt::seq(l.prog, r.prog), post: r.post })
            }
            Derivation::Cond { then_d, else_d } => {
                let t = self.node(then_d, &format!("{path}.then"))?;
                let e = self.node(else_d, &format!("{path}.else"))?;
                let (p, bf, g) = split_guard(&t.pre, path, "then-branch")?;
                let Formula::And(p2, nb) = &e.pre else {
                    return rule_error(path, "else-branch precondition is not a conjunction with the negated condition");
                };
                if !matches!(&**nb, Formula::Not(b2) if alpha_eq(b2, bf)) {
                    return rule_error(path, "else-branch precondition does not negate the condition");
                }
                if !alpha_eq(p, p2) {
                    return rule_error(path, "branch preconditions differ");
                }
                if !alpha_eq(&t.post, &e.post) {
                    return rule_error(path, "branch postconditions differ");
                }
                Ok(Triple { pre: p.clone(), prog: Stmt::if_(g, t.prog, e.prog), post: t.post })
            }
            Derivation::Iter { body_d } => {
                let b = self.node(body_d, &format!("{path}.body"))?;
                let (p, bf, g) = split_guard(&b.pre, path, "loop body")?;
                if !alpha_eq(p, &b.post) {
                    return rule_error(path, "loop body does not preserve the invariant");
                }
                Ok(Triple {
                    pre: p.clone(),
                    prog: Stmt::while_(g, b.prog),
                    post: Formula::and(p.clone(), Formula::not(bf.clone())),
                })
            }
            Derivation::Conseq { pre, inner, post } => {
                let t = self.node(inner, &format!("{path}.inner"))?;
                for (a, b, side) in [(pre, &t.pre, "pre"), (&t.post, post, "post")] {
                    let formula = Formula::imp(a.clone(), b.clone()).universal_closure();
                    let origin = format!("{path}/{side}");
                    self.obligations.push((Obligation { formula, origin }, a.clone(), b.clone()));
                }
                Ok(Triple { pre: pre.clone(), prog: t.prog, post: post.clone() })
            }
        }
    }
}

/// Collects the maximal non-propositional subformulas, up to renaming.
fn prop_atoms<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::Not(a) => prop_atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
            prop_atoms(a, out);
            prop_atoms(b, out);
        }
        other => {
            if !out.iter().any(|g| alpha_eq(g, other)) {
                out.push(other);
            }
        }
    }
}

fn prop_value(f: &Formula, atoms: &[&Formula], row: u32) -> bool {
    match f {
        Formula::Not(a) => !prop_value(a, atoms, row),
        Formula::And(a, b) => prop_value(a, atoms, row) && prop_value(b, atoms, row),
        Formula::Or(a, b) => prop_value(a, atoms, row) || prop_value(b, atoms, row),
        Formula::Imp(a, b) => !prop_value(a, atoms, row) || prop_value(b, atoms, row),
        Formula::Iff(a, b) => prop_value(a, atoms, row) == prop_value(b, atoms, row),
        other => {
            let k = atoms.iter().position(|g| alpha_eq(g, other)).expect("collected");
            row >> k & 1 == 1
        }
    }
}

/// Truth-table check treating quantified and atomic parts as opaque.
pub fn is_propositional_tautology(f: &Formula) -> bool {
    let mut atoms = Vec::new();
    prop_atoms(f, &mut atoms);
    if atoms.len() > 16 {
        return false;
    }
    (0..1u32 << atoms.len()).all(|row| prop_value(f, &atoms, row))
}

fn discharge(ob: &Obligation, lhs: &Formula, rhs: &Formula, evaluator: &Evaluator) -> Discharge {
    if alpha_eq(lhs, rhs) || is_propositional_tautology(&Formula::imp(lhs.clone(), rhs.clone())) {
        return Discharge::Tautology;
    }
    Discharge::Evaluated(evaluator.eval(&ob.formula, &State::new()))
}

/// Checks rule conformance and settles every obligation with `evaluator`.
pub fn check_derivation_with(d: &Derivation, evaluator: &Evaluator) -> CheckReport {
    let mut checker = Checker::default();
    let conclusion = match checker.node(d, "root") {
        Ok(t) => t,
        Err(e) => {
            return CheckReport {
                outcome: CheckOutcome::Invalid { reason: e.reason, path: e.path },
                conclusion: None,
                obligations: Vec::new(),
            }
        }
    };
    let mut settled = Vec::new();
    let mut refuted = None;
    for (ob, lhs, rhs) in checker.obligations {
        let how = discharge(&ob, &lhs, &rhs, evaluator);
        if how == Discharge::Evaluated(Verdict::False) && refuted.is_none() {
            refuted = Some(ob.clone());
        }
        settled.push((ob, how));
    }
    let outcome = if let Some(ob) = refuted {
        CheckOutcome::Invalid {
            reason: format!("side condition is false in ℕ: {}", ob.formula),
            path: ob.origin,
        }
    } else {
        let open: Vec<Obligation> = settled
            .iter()
            .filter(|(_, how)| *how == Discharge::Evaluated(Verdict::Unknown))
            .map(|(ob, _)| ob.clone())
            .collect();
        if open.is_empty() {
            CheckOutcome::Valid
        } else {
            CheckOutcome::ValidModuloObligations { obligations: open }
        }
    };
    CheckReport { outcome, conclusion: Some(conclusion), obligations: settled }
}

/// [`check_derivation_with`] at search bound `oracle_bound`.
pub fn check_derivation(d: &Derivation, oracle_bound: u64) -> CheckOutcome {
    check_derivation_with(d, &Evaluator::new(oracle_bound)).outcome
}
