//! A direct evaluator for bounded formulas and a random sentence generator.
//! Shares nothing with the library's evaluator beyond the syntax tree.

use std::collections::HashMap;

use hoarith::syntax::{Atom, Expr, Formula, Var};
use num_bigint::BigUint;
use rand::Rng;

pub type Env = HashMap<Var, BigUint>;

fn term(e: &Expr, env: &Env) -> BigUint {
    match e {
        Expr::Zero => BigUint::from(0u32),
        Expr::One => BigUint::from(1u32),
        Expr::Numeral(k) => k.clone(),
        Expr::Var(v) => env.get(v).cloned().unwrap_or_default(),
        Expr::Add(a, b) => term(a, env) + term(b, env),
        Expr::Mul(a, b) => term(a, env) * term(b, env),
    }
}

fn top(e: &Expr, env: &Env) -> u64 {
    term(e, env).try_into().expect("quantifier bounds stay small")
}

/// Truth of `phi` in ℕ, for formulas whose quantifiers are all bounded
/// (`∀v<t`, or `∃v` guarded by a leading `v < t`).
pub fn holds(phi: &Formula, env: &mut Env) -> bool {
    match phi {
        Formula::Atom(Atom::Less(a, b)) => term(a, env) < term(b, env),
        Formula::Atom(Atom::Eq(a, b)) => term(a, env) == term(b, env),
        Formula::Not(a) => !holds(a, env),
        Formula::And(a, b) => holds(a, env) && holds(b, env),
        Formula::Or(a, b) => holds(a, env) || holds(b, env),
        Formula::Imp(a, b) => !holds(a, env) || holds(b, env),
        Formula::Iff(a, b) => holds(a, env) == holds(b, env),
        Formula::BoundedForall(v, t, body) => {
            let n = top(t, env);
            let saved = env.get(v).cloned();
            let r = (0..n).all(|k| {
                env.insert(*v, k.into());
                holds(body, env)
            });
            restore(env, *v, saved);
            r
        }
        Formula::Exists(v, body) => {
            let Formula::And(guard, rest) = &**body else { panic!("unguarded existential") };
            let Formula::Atom(Atom::Less(Expr::Var(u), t)) = &**guard else { panic!("unguarded existential") };
            assert_eq!(u, v, "unguarded existential");
            let n = top(t, env);
            let saved = env.get(v).cloned();
            let r = (0..n).any(|k| {
                env.insert(*v, k.into());
                holds(rest, env)
            });
            restore(env, *v, saved);
            r
        }
        Formula::Forall(..) | Formula::Coded(_) => panic!("outside the bounded fragment"),
    }
}

fn restore(env: &mut Env, v: Var, saved: Option<BigUint>) {
    match saved {
        Some(n) => env.insert(v, n),
        None => env.remove(&v),
    };
}

pub fn env_of(xs: &[Var], values: &[u64]) -> Env {
    xs.iter().zip(values).map(|(x, v)| (*x, BigUint::from(*v))).collect()
}

/// Random closed sentences. Bound variables are `x0, x1, …` in nesting order.
pub struct SentenceGen<'r, R: Rng> {
    pub rng: &'r mut R,
    /// Also produce unguarded `∃` and `∀`.
    pub unbounded: bool,
}

impl<R: Rng> SentenceGen<'_, R> {
    fn term(&mut self, scope: u32, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.5) {
            if scope > 0 && self.rng.gen_bool(0.6) {
                return Expr::Var(Var(self.rng.gen_range(0..scope)));
            }
            return Expr::num(self.rng.gen_range(0u32..5));
        }
        let (a, b) = (self.term(scope, depth - 1), self.term(scope, depth - 1));
        if self.rng.gen_bool(0.6) { Expr::add(a, b) } else { Expr::mul(a, b) }
    }

    fn bound(&mut self, scope: u32) -> Expr {
        if scope > 0 && self.rng.gen_bool(0.4) {
            Expr::add(Expr::Var(Var(self.rng.gen_range(0..scope))), Expr::num(self.rng.gen_range(0u32..2)))
        } else {
            Expr::num(self.rng.gen_range(0u32..5))
        }
    }

    pub fn formula(&mut self, scope: u32, depth: u32) -> Formula {
        let atom = |g: &mut Self| {
            let (a, b) = (g.term(scope, 2), g.term(scope, 2));
            if g.rng.gen_bool(0.5) { Formula::less(a, b) } else { Formula::eq(a, b) }
        };
        if depth == 0 {
            return atom(self);
        }
        let v = Var(scope);
        match self.rng.gen_range(0..9) {
            0 | 1 => atom(self),
            2 => Formula::not(self.formula(scope, depth - 1)),
            3 => Formula::and(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            4 => Formula::or(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            5 => Formula::imp(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            6 => {
                let t = self.bound(scope);
                Formula::BoundedForall(v, t, Box::new(self.formula(scope + 1, depth - 1)))
            }
            7 if self.unbounded && self.rng.gen_bool(0.5) => Formula::forall(v, self.formula(scope + 1, depth - 1)),
            _ if self.unbounded && self.rng.gen_bool(0.4) => Formula::exists(v, self.formula(scope + 1, depth - 1)),
            _ => {
                let t = self.bound(scope);
                let body = self.formula(scope + 1, depth - 1);
                Formula::exists(v, Formula::and(Formula::less(Expr::Var(v), t), body))
            }
        }
    }

    /// A sentence with at least one quantifier.
    pub fn sentence(&mut self, depth: u32) -> Formula {
        loop {
            let phi = self.formula(0, depth);
            if !phi.is_quantifier_free() {
                return phi;
            }
        }
    }
}
