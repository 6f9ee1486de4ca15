//! S-expression rendering of the syntax trees.

use std::fmt::Write as _;

use super::{Atom, BExpr, Coded, Expr, Formula, Stmt};

/// Renders a tree as a parenthesized prefix expression.
pub trait SExpr {
    fn write_sexpr(&self, out: &mut String);

    fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out);
        out
    }
}

impl SExpr for Expr {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            Expr::Zero => out.push('0'),
            Expr::One => out.push('1'),
            Expr::Numeral(k) => {
                let _ = write!(out, "{k}");
            }
            Expr::Var(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::Add(a, b) => node(out, "+", &[&**a, &**b]),
            Expr::Mul(a, b) => node(out, "*", &[&**a, &**b]),
        }
    }
}

fn node(out: &mut String, head: &str, args: &[&dyn SExpr]) {
    out.push('(');
    out.push_str(head);
    for a in args {
        out.push(' ');
        a.write_sexpr(out);
    }
    out.push(')');
}

impl SExpr for Atom {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            Atom::Less(a, b) => node(out, "<", &[a, b]),
            Atom::Eq(a, b) => node(out, "=", &[a, b]),
        }
    }
}

impl SExpr for BExpr {
    fn write_sexpr(&self, out: &mut String) {
        self.to_formula().write_sexpr(out)
    }
}

impl SExpr for Coded {
    fn write_sexpr(&self, out: &mut String) {
        let args: Vec<&dyn SExpr> = self.args().into_iter().map(|e| e as &dyn SExpr).collect();
        node(out, self.name(), &args)
    }
}

impl SExpr for Formula {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            Formula::Atom(a) => a.write_sexpr(out),
            Formula::Coded(c) => c.write_sexpr(out),
            Formula::Not(a) => node(out, "not", &[&**a]),
            Formula::Imp(a, b) => node(out, "=>", &[&**a, &**b]),
            Formula::And(a, b) => node(out, "and", &[&**a, &**b]),
            Formula::Or(a, b) => node(out, "or", &[&**a, &**b]),
            Formula::Iff(a, b) => node(out, "iff", &[&**a, &**b]),
            Formula::Forall(v, body) => {
                let _ = write!(out, "(forall {v} ");
                body.write_sexpr(out);
                out.push(')');
            }
            Formula::Exists(v, body) => {
                let _ = write!(out, "(exists {v} ");
                body.write_sexpr(out);
                out.push(')');
            }
            Formula::BoundedForall(v, t, body) => {
                let _ = write!(out, "(forall< {v} ");
                t.write_sexpr(out);
                out.push(' ');
                body.write_sexpr(out);
                out.push(')');
            }
        }
    }
}

impl SExpr for Stmt {
    fn write_sexpr(&self, out: &mut String) {
        match self {
            Stmt::Assign(x, e) => {
                let _ = write!(out, "(:= {x} ");
                e.write_sexpr(out);
                out.push(')');
            }
            Stmt::Seq(a, b) => node(out, "seq", &[&**a, &**b]),
            Stmt::If(g, a, b) => node(out, "if", &[g, &**a, &**b]),
            Stmt::While(g, body) => node(out, "while", &[g, &**body]),
        }
    }
}
