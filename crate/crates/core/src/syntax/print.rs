//! Surface-syntax printer. Output parses back to the same tree.

use std::fmt;

use super::{Atom, Coded, Expr, Formula, Names, Stmt, Var};

fn write_var(f: &mut dyn fmt::Write, v: Var, names: Option<&Names>) -> fmt::Result {
    match names.and_then(|n| n.name_of(v)) {
        Some(name) => f.write_str(name),
        None => write!(f, "{v}"),
    }
}

// ctx: 0 anywhere, 1 right operand of `+`, 2 left operand of `*`, 3 right operand of `*`.
pub(crate) fn write_expr(
    f: &mut dyn fmt::Write,
    e: &Expr,
    names: Option<&Names>,
    ctx: u8,
) -> fmt::Result {
    match e {
        Expr::Zero => f.write_str("0"),
        Expr::One => f.write_str("1"),
        Expr::Numeral(k) => write!(f, "{k}"),
        Expr::Var(v) => write_var(f, *v, names),
        Expr::Add(a, b) => {
            let paren = ctx >= 1;
            if paren {
                f.write_char('(')?;
            }
            write_expr(f, a, names, 0)?;
            f.write_str(" + ")?;
            write_expr(f, b, names, 1)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
        Expr::Mul(a, b) => {
            let paren = ctx >= 3;
            if paren {
                f.write_char('(')?;
            }
            write_expr(f, a, names, 2)?;
            f.write_str(" * ")?;
            write_expr(f, b, names, 3)?;
            if paren {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn write_atom(f: &mut dyn fmt::Write, a: &Atom, names: Option<&Names>) -> fmt::Result {
    let (l, op, r) = match a {
        Atom::Less(l, r) => (l, " < ", r),
        Atom::Eq(l, r) => (l, " = ", r),
    };
    write_expr(f, l, names, 0)?;
    f.write_str(op)?;
    write_expr(f, r, names, 0)
}

fn write_coded(f: &mut dyn fmt::Write, c: &Coded, names: Option<&Names>) -> fmt::Result {
    write!(f, "{}(", c.name())?;
    for (k, a) in c.args().into_iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write_expr(f, a, names, 0)?;
    }
    f.write_char(')')
}

// Binding strength; quantifiers extend as far right as possible, so they
// are parenthesized whenever they occur as an operand.
fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Forall(..) | Formula::Exists(..) | Formula::BoundedForall(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Imp(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        Formula::Atom(_) | Formula::Coded(_) => 6,
    }
}

pub(crate) fn write_formula(
    f: &mut dyn fmt::Write,
    phi: &Formula,
    names: Option<&Names>,
    required: u8,
) -> fmt::Result {
    let paren = level(phi) < required;
    if paren {
        f.write_char('(')?;
    }
    let binary = |f: &mut dyn fmt::Write, a: &Formula, op: &str, b: &Formula, lvl: u8| {
        write_formula(f, a, names, lvl + 1)?;
        f.write_str(op)?;
        write_formula(f, b, names, lvl)
    };
    match phi {
        Formula::Atom(a) => write_atom(f, a, names)?,
        Formula::Coded(c) => write_coded(f, c, names)?,
        Formula::Not(a) => {
            f.write_char('~')?;
            write_formula(f, a, names, 5)?;
        }
        Formula::Iff(a, b) => binary(f, a, " <-> ", b, 1)?,
        Formula::Imp(a, b) => binary(f, a, " -> ", b, 2)?,
        Formula::Or(a, b) => binary(f, a, " \\/ ", b, 3)?,
        Formula::And(a, b) => binary(f, a, " /\\ ", b, 4)?,
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let q = if matches!(phi, Formula::Forall(..)) { "forall " } else { "exists " };
            f.write_str(q)?;
            write_var(f, *v, names)?;
            f.write_str(". ")?;
            write_formula(f, body, names, 0)?;
        }
        Formula::BoundedForall(v, t, body) => {
            f.write_str("forall ")?;
            write_var(f, *v, names)?;
            f.write_str(" < ")?;
            write_expr(f, t, names, 0)?;
            f.write_str(". ")?;
            write_formula(f, body, names, 0)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

fn write_stmt(
    f: &mut dyn fmt::Write,
    s: &Stmt,
    names: Option<&Names>,
    pretty: Option<usize>,
) -> fmt::Result {
    let newline = |f: &mut dyn fmt::Write, indent: usize| -> fmt::Result {
        f.write_char('\n')?;
        for _ in 0..indent {
            f.write_str("  ")?;
        }
        Ok(())
    };
    let sep = |f: &mut dyn fmt::Write, indent: Option<usize>| match indent {
        Some(i) => newline(f, i),
        None => f.write_char(' '),
    };
    let inner = pretty.map(|i| i + 1);
    match s {
        Stmt::Assign(x, e) => {
            write_var(f, *x, names)?;
            f.write_str(" := ")?;
            write_expr(f, e, names, 0)
        }
        Stmt::Seq(a, b) => {
            if matches!(**a, Stmt::Seq(..)) {
                f.write_char('(')?;
                write_stmt(f, a, names, pretty)?;
                f.write_char(')')?;
            } else {
                write_stmt(f, a, names, pretty)?;
            }
            f.write_char(';')?;
            sep(f, pretty)?;
            write_stmt(f, b, names, pretty)
        }
        Stmt::If(g, s1, s2) => {
            f.write_str("if ")?;
            write_formula(f, &g.to_formula(), names, 0)?;
            f.write_str(" then")?;
            sep(f, inner)?;
            write_stmt(f, s1, names, inner)?;
            sep(f, pretty)?;
            f.write_str("else")?;
            sep(f, inner)?;
            write_stmt(f, s2, names, inner)?;
            sep(f, pretty)?;
            f.write_str("fi")
        }
        Stmt::While(g, body) => {
            f.write_str("while ")?;
            write_formula(f, &g.to_formula(), names, 0)?;
            f.write_str(" do")?;
            sep(f, inner)?;
            write_stmt(f, body, names, inner)?;
            sep(f, pretty)?;
            f.write_str("od")
        }
    }
}

/// Displays a formula, using interned names where available.
pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    names: Option<&'a Names>,
}

impl<'a> FormulaDisplay<'a> {
    pub fn new(formula: &'a Formula, names: Option<&'a Names>) -> Self {
        FormulaDisplay { formula, names }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, self.names, 0)
    }
}

/// Displays a program on one line, or indented over several lines with `{:#}`.
pub struct StmtDisplay<'a> {
    stmt: &'a Stmt,
    names: Option<&'a Names>,
}

impl<'a> StmtDisplay<'a> {
    pub fn new(stmt: &'a Stmt, names: Option<&'a Names>) -> Self {
        StmtDisplay { stmt, names }
    }
}

impl fmt::Display for StmtDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pretty = if f.alternate() { Some(0) } else { None };
        write_stmt(f, self.stmt, self.names, pretty)
    }
}
