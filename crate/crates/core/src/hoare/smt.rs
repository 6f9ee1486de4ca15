//! SMT-LIB v2 rendering of obligations.
//!
//! Naturals become integers guarded by nonnegativity; coding predicates are
//! expanded to their defining formulas first. Each file asserts the negation
//! of one obligation, so `unsat` means the obligation holds over the integers
//! restricted to nonnegative values.

use std::fmt::Write;

use super::Obligation;
use crate::syntax::{Atom, Expr, Formula, Var};

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Zero => out.push('0'),
        Expr::One => out.push('1'),
        Expr::Numeral(k) => write!(out, "{k}").unwrap(),
        Expr::Var(v) => write!(out, "{v}").unwrap(),
        Expr::Add(a, b) | Expr::Mul(a, b) => {
            out.push_str(if matches!(e, Expr::Add(..)) { "(+ " } else { "(* " });
            expr(out, a);
            out.push(' ');
            expr(out, b);
            out.push(')');
        }
    }
}

fn binder(out: &mut String, q: &str, v: Var, guard: &str, body: impl FnOnce(&mut String)) {
    write!(out, "({q} (({v} Int)) ({guard} (>= {v} 0) ").unwrap();
    body(out);
    out.push_str("))");
}

fn formula(out: &mut String, f: &Formula) {
    let bin = |out: &mut String, op: &str, a: &Formula, b: &Formula| {
        write!(out, "({op} ").unwrap();
        formula(out, a);
        out.push(' ');
        formula(out, b);
        out.push(')');
    };
    match f {
        Formula::Atom(a) => {
            let (op, l, r) = match a {
                Atom::Less(l, r) => ("<", l, r),
                Atom::Eq(l, r) => ("=", l, r),
            };
            write!(out, "({op} ").unwrap();
            expr(out, l);
            out.push(' ');
            expr(out, r);
            out.push(')');
        }
        Formula::Coded(c) => formula(out, &c.expand()),
        Formula::Not(a) => {
            out.push_str("(not ");
            formula(out, a);
            out.push(')');
        }
        Formula::And(a, b) => bin(out, "and", a, b),
        Formula::Or(a, b) => bin(out, "or", a, b),
        Formula::Imp(a, b) => bin(out, "=>", a, b),
        Formula::Iff(a, b) => bin(out, "=", a, b),
        Formula::Forall(v, body) => binder(out, "forall", *v, "=>", |o| formula(o, body)),
        Formula::Exists(v, body) => binder(out, "exists", *v, "and", |o| formula(o, body)),
        Formula::BoundedForall(v, t, body) => {
            write!(out, "(forall (({v} Int)) (=> (and (>= {v} 0) (< {v} ").unwrap();
            expr(out, t);
            out.push_str(")) ");
            formula(out, body);
            out.push_str("))");
        }
    }
}

/// One SMT-LIB term for `f`.
pub fn formula_to_smt(f: &Formula) -> String {
    let mut out = String::new();
    formula(&mut out, f);
    out
}

/// A complete script asserting the negation of `ob`.
pub fn obligation_to_smt2(ob: &Obligation) -> String {
    let mut out = String::new();
    writeln!(out, "; obligation from {}", ob.origin).unwrap();
    writeln!(out, "; {}", ob.formula).unwrap();
    out.push_str("(set-logic NIA)\n");
    for v in ob.formula.free_vars() {
        writeln!(out, "(declare-const {v} Int)").unwrap();
        writeln!(out, "(assert (>= {v} 0))").unwrap();
    }
    writeln!(out, "(assert (not {}))", formula_to_smt(&ob.formula)).unwrap();
    out.push_str("(check-sat)\n");
    out
}
