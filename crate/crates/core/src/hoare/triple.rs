//! Semantic checks of triples on finite boxes, and the arithmetic axioms.

use serde::{Deserialize, Serialize};

use crate::eval::{Evaluator, Verdict};
use crate::interp::{exec, ExecOutcome, State};
use crate::syntax::{Expr, Formula, Nat, Triple, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub initial: State,
    #[serde(rename = "final")]
    pub final_state: State,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    /// States where the precondition was definitely true.
    pub relevant: usize,
    /// States left undecided (precondition, postcondition or fuel).
    pub undecided: usize,
}

/// Every assignment of `0..=top` to `xs`, in lexicographic order.
pub fn box_states(xs: &[Var], top: u64) -> impl Iterator<Item = State> + '_ {
    let mut digits = vec![0u64; xs.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let st = State::from_pairs(xs.iter().zip(&digits).map(|(v, d)| (*v, Nat::from(*d))));
        done = true;
        for d in digits.iter_mut().rev() {
            if *d < top {
                *d += 1;
                done = false;
                break;
            }
            *d = 0;
        }
        Some(st)
    })
}

/// Sweeps all states over `xs` with values `≤ top`: whenever `pre` is
/// definitely true and the program stops, `post` must not be false at the
/// final state. The first violation is returned as a counterexample.
pub fn check_triple_bounded(t: &Triple, xs: &[Var], top: u64, fuel: u64, evaluator: &Evaluator) -> TripleCheck {
    let mut relevant = 0;
    let mut undecided = 0;
    for w in box_states(xs, top) {
        match evaluator.eval(&t.pre, &w) {
            Verdict::False => continue,
            Verdict::Unknown => {
                undecided += 1;
                continue;
            }
            Verdict::True => relevant += 1,
        }
        let ExecOutcome::Terminated { state, .. } = exec(&t.prog, &w, fuel) else {
            undecided += 1;
            continue;
        };
        match evaluator.eval(&t.post, &state) {
            Verdict::True => {}
            Verdict::Unknown => undecided += 1,
            Verdict::False => {
                return TripleCheck {
                    verdict: Verdict::False,
                    counterexample: Some(Counterexample { initial: w, final_state: state }),
                    relevant,
                    undecided,
                }
            }
        }
    }
    let verdict = if undecided == 0 { Verdict::True } else { Verdict::Unknown };
    TripleCheck { verdict, counterexample: None, relevant, undecided }
}

/// `φ(0) ∧ ∀x (φ(x) → φ(x+1)) → ∀x φ(x)`, closed over the other free variables.
pub fn instantiate_induction(phi: &Formula, x: Var) -> Formula {
    let at = |e: Expr| phi.substitute(&[(x, e)].into_iter().collect());
    let base = at(Expr::Zero);
    let step = Formula::forall(x, Formula::imp(phi.clone(), at(Expr::add(Expr::Var(x), Expr::One))));
    let schema = Formula::imp(Formula::and(base, step), Formula::forall(x, phi.clone()));
    schema.universal_closure()
}

/// The first six arithmetic axioms as closed formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaAxioms {
    pub s1: Formula,
    pub s2: Formula,
    pub s3: Formula,
    pub s4: Formula,
    pub s5: Formula,
    pub s6: Formula,
}

impl PaAxioms {
    pub fn all(&self) -> [(&'static str, &Formula); 6] {
        [
            ("S1", &self.s1),
            ("S2", &self.s2),
            ("S3", &self.s3),
            ("S4", &self.s4),
            ("S5", &self.s5),
            ("S6", &self.s6),
        ]
    }

    /// The induction instance for `φ` on `x`.
    pub fn induction(&self, phi: &Formula, x: Var) -> Formula {
        instantiate_induction(phi, x)
    }
}

pub fn pa_axioms() -> PaAxioms {
    let (x, y) = (Var(0), Var(1));
    let (xe, ye) = (Expr::Var(x), Expr::Var(y));
    let succ = |e: Expr| Expr::add(e, Expr::One);
    let both = |f: Formula| Formula::forall_many(&[x, y], f);
    PaAxioms {
        s1: Formula::forall(x, Formula::not(Formula::eq(succ(xe.clone()), Expr::Zero))),
        s2: both(Formula::imp(
            Formula::eq(succ(xe.clone()), succ(ye.clone())),
            Formula::eq(xe.clone(), ye.clone()),
        )),
        s3: Formula::forall(x, Formula::eq(Expr::add(xe.clone(), Expr::Zero), xe.clone())),
        s4: both(Formula::eq(
            Expr::add(xe.clone(), succ(ye.clone())),
            succ(Expr::add(xe.clone(), ye.clone())),
        )),
        s5: Formula::forall(x, Formula::eq(Expr::mul(xe.clone(), Expr::Zero), Expr::Zero)),
        s6: both(Formula::eq(
            Expr::mul(xe.clone(), succ(ye.clone())),
            Expr::add(Expr::mul(xe.clone(), ye), xe),
        )),
    }
}
