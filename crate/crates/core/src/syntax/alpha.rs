use super::{Atom, Coded, Expr, Formula, Var};

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    Env::default().formula(a, b)
}

#[derive(Default)]
struct Env {
    left: Vec<Var>,
    right: Vec<Var>,
}

impl Env {
    fn var(&self, x: Var, y: Var) -> bool {
        let i = self.left.iter().rposition(|v| *v == x);
        let j = self.right.iter().rposition(|v| *v == y);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn expr(&self, a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Var(x), Expr::Var(y)) => self.var(*x, *y),
            (Expr::Add(a1, a2), Expr::Add(b1, b2)) | (Expr::Mul(a1, a2), Expr::Mul(b1, b2)) => {
                self.expr(a1, b1) && self.expr(a2, b2)
            }
            (Expr::Zero, Expr::Zero) | (Expr::One, Expr::One) => true,
            (Expr::Numeral(m), Expr::Numeral(n)) => m == n,
            _ => false,
        }
    }

    fn exprs(&self, a: &[&Expr], b: &[&Expr]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.expr(x, y))
    }

    fn binder(&mut self, x: Var, y: Var, a: &Formula, b: &Formula) -> bool {
        self.left.push(x);
        self.right.push(y);
        let r = self.formula(a, b);
        self.left.pop();
        self.right.pop();
        r
    }

    fn formula(&mut self, a: &Formula, b: &Formula) -> bool {
        match (a, b) {
            (Formula::Atom(Atom::Less(a1, a2)), Formula::Atom(Atom::Less(b1, b2)))
            | (Formula::Atom(Atom::Eq(a1, a2)), Formula::Atom(Atom::Eq(b1, b2))) => {
                self.expr(a1, b1) && self.expr(a2, b2)
            }
            (Formula::Coded(c), Formula::Coded(d)) => {
                std::mem::discriminant::<Coded>(c) == std::mem::discriminant(d)
                    && self.exprs(&c.args(), &d.args())
            }
            (Formula::Not(x), Formula::Not(y)) => self.formula(x, y),
            (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
            | (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => {
                self.formula(a1, b1) && self.formula(a2, b2)
            }
            (Formula::Forall(x, p), Formula::Forall(y, q))
            | (Formula::Exists(x, p), Formula::Exists(y, q)) => self.binder(*x, *y, p, q),
            (Formula::BoundedForall(x, s, p), Formula::BoundedForall(y, t, q)) => {
                self.expr(s, t) && self.binder(*x, *y, p, q)
            }
            _ => false,
        }
    }
}
