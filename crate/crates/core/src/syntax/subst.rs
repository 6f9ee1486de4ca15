//! Simultaneous capture-avoiding substitution.

use std::collections::{BTreeMap, BTreeSet};

use super::{Atom, BExpr, Expr, Formula, Var};

/// A finite map from variables to the terms replacing them.
pub type Subst = BTreeMap<Var, Expr>;

impl Expr {
    pub fn substitute(&self, sigma: &Subst) -> Expr {
        match self {
            Expr::Var(v) => sigma.get(v).cloned().unwrap_or(Expr::Var(*v)),
            Expr::Add(a, b) => Expr::add(a.substitute(sigma), b.substitute(sigma)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(sigma), b.substitute(sigma)),
            other => other.clone(),
        }
    }
}

impl BExpr {
    pub fn substitute(&self, sigma: &Subst) -> BExpr {
        self.map_exprs(&mut |e| e.substitute(sigma))
    }
}

impl Formula {
    pub fn substitute(&self, sigma: &Subst) -> Formula {
        substitute(self, sigma)
    }

    /// `self(es/xs)`: simultaneous replacement of each `xs[k]` by `es[k]`.
    pub fn subst_vars(&self, xs: &[Var], es: &[Expr]) -> Formula {
        let sigma: Subst = xs.iter().copied().zip(es.iter().cloned()).collect();
        substitute(self, &sigma)
    }

    /// Renames `xs[k]` to `ys[k]` simultaneously.
    pub fn rename(&self, xs: &[Var], ys: &[Var]) -> Formula {
        let es: Vec<Expr> = ys.iter().map(|y| Expr::Var(*y)).collect();
        self.subst_vars(xs, &es)
    }
}

/// Replaces free occurrences of each `x ∈ dom σ` by `σ(x)` simultaneously,
/// renaming bound variables whenever a replacement term would be captured.
pub fn substitute(phi: &Formula, sigma: &Subst) -> Formula {
    let sigma: Subst = sigma
        .iter()
        .filter(|(v, e)| **e != Expr::Var(**v))
        .map(|(v, e)| (*v, e.clone()))
        .collect();
    if sigma.is_empty() {
        return phi.clone();
    }
    go(phi, &sigma)
}

fn range_vars(sigma: &Subst) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for e in sigma.values() {
        e.collect_vars(&mut out);
    }
    out
}

fn go(phi: &Formula, sigma: &Subst) -> Formula {
    if sigma.is_empty() {
        return phi.clone();
    }
    match phi {
        Formula::Atom(a) => Formula::Atom(match a {
            Atom::Less(l, r) => Atom::Less(l.substitute(sigma), r.substitute(sigma)),
            Atom::Eq(l, r) => Atom::Eq(l.substitute(sigma), r.substitute(sigma)),
        }),
        Formula::Coded(c) => Formula::Coded(c.map_exprs(&mut |e| e.substitute(sigma))),
        Formula::Not(a) => Formula::not(go(a, sigma)),
        Formula::Imp(a, b) => Formula::imp(go(a, sigma), go(b, sigma)),
        Formula::And(a, b) => Formula::and(go(a, sigma), go(b, sigma)),
        Formula::Or(a, b) => Formula::or(go(a, sigma), go(b, sigma)),
        Formula::Iff(a, b) => Formula::iff(go(a, sigma), go(b, sigma)),
        Formula::Forall(v, body) => {
            let (v, body) = binder(*v, body, sigma, None);
            Formula::Forall(v, Box::new(body))
        }
        Formula::Exists(v, body) => {
            let (v, body) = binder(*v, body, sigma, None);
            Formula::Exists(v, Box::new(body))
        }
        Formula::BoundedForall(v, t, body) => {
            let t = t.substitute(sigma);
            let (v, body) = binder(*v, body, sigma, Some(&t));
            Formula::BoundedForall(v, t, Box::new(body))
        }
    }
}

// `bound` is the already substituted bound of a bounded quantifier, which
// must not mention the binder either.
fn binder(v: Var, body: &Formula, sigma: &Subst, bound: Option<&Expr>) -> (Var, Formula) {
    let free = body.free_vars();
    let inner: Subst = sigma
        .iter()
        .filter(|(x, _)| **x != v && free.contains(x))
        .map(|(x, e)| (*x, e.clone()))
        .collect();
    let bound_clash = bound.is_some_and(|t| t.mentions(v));
    if inner.is_empty() && !bound_clash {
        return (v, body.clone());
    }
    if !bound_clash && !range_vars(&inner).contains(&v) {
        return (v, go(body, &inner));
    }
    // The binder would capture a variable of some replacement term.
    let mut avoid = body.all_vars();
    if let Some(t) = bound {
        t.collect_vars(&mut avoid);
    }
    avoid.extend(sigma.keys().copied());
    avoid.extend(range_vars(sigma));
    avoid.insert(v);
    let fresh = Var(avoid.iter().next_back().map_or(0, |m| m.0 + 1));
    let mut renamed = inner;
    renamed.insert(v, Expr::Var(fresh));
    (fresh, go(body, &renamed))
}
