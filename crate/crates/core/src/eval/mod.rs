//! Sound three-valued evaluation of formulas over ℕ.
//!
//! `True` and `False` are always correct in the standard model. `Unknown`
//! means the search ran past `bound` or out of budget without settling the
//! question. Bounded quantifiers, and unbounded ones whose variable is pinned
//! down by an equation, a coding predicate or an upper bound, are decided
//! exactly; the rest are searched over `0..=bound`.

mod compile;
mod solve;
mod witness;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interp::State;
use crate::syntax::{Atom, Expr, Formula};

pub use witness::{check_alpha_witness, verify_witness, WitnessError, WitnessTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Unknown,
        }
    }

    pub fn or(self, other: Verdict) -> Verdict {
        self.not().and(other.not()).not()
    }

    pub fn is_definite(self) -> bool {
        self != Verdict::Unknown
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Search limits for [`Evaluator::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluator {
    /// Largest value tried for an unbounded quantifier.
    pub bound: u64,
    /// Work units per search pass before giving up with `Unknown`.
    pub budget: u64,
}

pub const DEFAULT_BUDGET: u64 = 200_000;

impl Evaluator {
    pub fn new(bound: u64) -> Self {
        Evaluator { bound, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Free variables of `phi` take their values from `w`.
    ///
    /// Unbounded searches are run with caps 1, 2, 4, … up to `bound`, so a
    /// verdict obtained at one power-of-two bound is reproduced at every
    /// larger one.
    pub fn eval(&self, phi: &Formula, w: &State) -> Verdict {
        let mut c = compile::Compiler::default();
        let node = c.compile(phi, true);
        let mut env = vec![None; c.next];
        for (v, s) in &c.free {
            env[*s] = Some(w.get(*v));
        }
        let mut cap = self.bound.min(1);
        loop {
            let mut solver = solve::Solver::new(env.clone(), cap, self.budget);
            let r = solver.eval(&node);
            if r.is_definite() || !solver.used_cap || solver.exhausted || cap >= self.bound {
                return r;
            }
            cap = cap.saturating_mul(2).min(self.bound);
        }
    }
}

/// [`Evaluator::eval`] with the default budget.
pub fn eval_formula(phi: &Formula, w: &State, bound: u64) -> Verdict {
    Evaluator::new(bound).eval(phi, w)
}

/// Every quantifier is bounded: `∀v<t`, or `∃v (v < t ∧ …)` with `v` not in `t`.
pub fn is_delta0(phi: &Formula) -> bool {
    match phi {
        Formula::Atom(_) | Formula::Coded(_) => true,
        Formula::Not(a) => is_delta0(a),
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
            is_delta0(a) && is_delta0(b)
        }
        Formula::BoundedForall(_, _, body) => is_delta0(body),
        Formula::Exists(v, body) => match &**body {
            Formula::And(guard, rest) => {
                matches!(&**guard, Formula::Atom(Atom::Less(Expr::Var(u), t)) if u == v && !t.mentions(*v))
                    && is_delta0(rest)
            }
            _ => false,
        },
        Formula::Forall(..) => false,
    }
}
