//! Recursive-descent parser for programs, guards and formulas.

use std::collections::BTreeSet;
use std::fmt;

use super::{BExpr, Coded, Expr, Formula, Names, Nat, Stmt, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: unexpected {}", self.line, self.col, self.found)?;
        if !self.expected.is_empty() {
            write!(f, ", expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(Nat),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Num(n) => write!(f, "numeral `{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &["if", "then", "else", "fi", "while", "do", "od", "forall", "exists"];
const CODED: &[&str] = &["pair", "beta", "elem", "untuple"];

// Longest symbols first so that `<->` wins over `<`.
const SYMBOLS: &[&str] = &[
    "<->", ":=", "<=", "->", "/\\", "\\/", "<", "=", "~", ";", "(", ")", ",", ".", "+", "*", "·",
];

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if c == '\n' {
            line += 1;
            col = 1;
            rest = &rest[1..];
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if rest.starts_with("//") || c == '#' {
            let end = rest.find('\n').unwrap_or(rest.len());
            rest = &rest[end..];
            continue;
        }
        let start_col = col;
        if c.is_ascii_digit() {
            let end = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let n = Nat::parse_bytes(rest[..end].as_bytes(), 10).expect("digits");
            out.push(Spanned { tok: Tok::Num(n), line, col: start_col });
            col += end;
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '\''))
                .unwrap_or(rest.len());
            out.push(Spanned { tok: Tok::Ident(rest[..end].to_string()), line, col: start_col });
            col += end;
            rest = &rest[end..];
            continue;
        }
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Spanned { tok: Tok::Sym(s), line, col: start_col });
                col += s.chars().count();
                rest = &rest[s.len()..];
            }
            None => {
                return Err(ParseError {
                    line,
                    col,
                    found: format!("character `{c}`"),
                    expected: Vec::new(),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser<'n> {
    toks: Vec<Spanned>,
    pos: usize,
    names: &'n mut Names,
    // Furthest failure seen, used to report the most informative error
    // after backtracking.
    best: Option<(usize, BTreeSet<String>)>,
}

type PResult<T> = Result<T, ()>;

impl<'n> Parser<'n> {
    fn new(text: &str, names: &'n mut Names) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        for t in &toks {
            if let Tok::Ident(s) = &t.tok {
                if let Some(k) = Names::explicit_index(s) {
                    names.reserve(k);
                }
            }
        }
        Ok(Parser { toks, pos: 0, names, best: None })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&mut self, expected: &[&str]) -> PResult<T> {
        match &mut self.best {
            Some((pos, set)) if *pos == self.pos => {
                set.extend(expected.iter().map(|s| s.to_string()));
            }
            Some((pos, _)) if *pos > self.pos => {}
            _ => self.best = Some((self.pos, expected.iter().map(|s| s.to_string()).collect())),
        }
        Err(())
    }

    fn error(&self) -> ParseError {
        let (pos, expected) = self.best.clone().unwrap_or((self.pos, BTreeSet::new()));
        let t = &self.toks[pos];
        ParseError {
            line: t.line,
            col: t.col,
            found: t.tok.to_string(),
            expected: expected.into_iter().collect(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{kw}`")])
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn variable(&mut self) -> PResult<Var> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(self.names.intern(&s))
            }
            _ => self.fail(&["variable"]),
        }
    }

    // ---- programs

    fn program(&mut self) -> PResult<Stmt> {
        let first = self.statement()?;
        if self.eat_sym(";") {
            let rest = self.program()?;
            Ok(Stmt::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        if self.is_kw("if") {
            self.bump();
            let g = self.guard()?;
            self.expect_kw("then")?;
            let s1 = self.program()?;
            self.expect_kw("else")?;
            let s2 = self.program()?;
            self.expect_kw("fi")?;
            return Ok(Stmt::if_(g, s1, s2));
        }
        if self.is_kw("while") {
            self.bump();
            let g = self.guard()?;
            self.expect_kw("do")?;
            let body = self.program()?;
            self.expect_kw("od")?;
            return Ok(Stmt::while_(g, body));
        }
        if self.is_sym("(") {
            self.bump();
            let s = self.program()?;
            self.expect_sym(")")?;
            return Ok(s);
        }
        if !matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            return self.fail(&["variable", "`if`", "`while`", "`(`"]);
        }
        let x = self.variable()?;
        self.expect_sym(":=")?;
        let e = self.expr()?;
        Ok(Stmt::assign(x, e))
    }

    fn guard(&mut self) -> PResult<BExpr> {
        let at = self.pos;
        let f = self.formula()?;
        match BExpr::try_from(&f) {
            Ok(b) => Ok(b),
            Err(_) => {
                self.pos = at;
                self.best = None;
                self.fail(&["quantifier-free guard"])
            }
        }
    }

    // ---- formulas

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if self.eat_sym("<->") {
            let rhs = self.formula()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat_sym("->") {
            let rhs = self.implication()?;
            Ok(Formula::imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let lhs = self.conjunction()?;
        if self.eat_sym("\\/") {
            let rhs = self.disjunction()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let lhs = self.unary()?;
        if self.eat_sym("/\\") {
            let rhs = self.conjunction()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat_sym("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            let universal = self.is_kw("forall");
            self.bump();
            let v = self.variable()?;
            let bound = if self.eat_sym("<") { Some(self.expr()?) } else { None };
            self.expect_sym(".")?;
            let body = self.formula()?;
            return match (universal, bound) {
                (true, None) => Ok(Formula::forall(v, body)),
                (false, None) => Ok(Formula::exists(v, body)),
                (true, Some(t)) => {
                    if t.mentions(v) {
                        return self.fail(&["bound not mentioning the quantified variable"]);
                    }
                    Ok(Formula::BoundedForall(v, t, Box::new(body)))
                }
                (false, Some(t)) => {
                    Ok(Formula::exists(v, Formula::and(Formula::less(Expr::Var(v), t), body)))
                }
            };
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Formula> {
        if let Tok::Ident(s) = self.peek() {
            if CODED.contains(&s.as_str()) && matches!(self.peek_at(1), Tok::Sym("(")) {
                return self.coded();
            }
        }
        if self.is_sym("(") {
            // Either a parenthesized formula or a comparison whose left
            // operand starts with a parenthesized term.
            let at = self.pos;
            if let Ok(f) = self.comparison() {
                return Ok(f);
            }
            self.pos = at;
            self.bump();
            let f = self.formula()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        self.comparison()
    }

    fn coded(&mut self) -> PResult<Formula> {
        let name = match self.bump() {
            Tok::Ident(s) => s,
            _ => unreachable!(),
        };
        self.expect_sym("(")?;
        let mut args = vec![self.expr()?];
        while self.eat_sym(",") {
            args.push(self.expr()?);
        }
        self.expect_sym(")")?;
        let arity_ok = match name.as_str() {
            "pair" | "elem" => args.len() == 3,
            "beta" => args.len() == 4,
            _ => args.len() >= 2,
        };
        if !arity_ok {
            return self.fail(&[&format!("correct number of arguments for `{name}`")]);
        }
        let a = |k: usize| args[k].clone();
        let c = match name.as_str() {
            "pair" => Coded::Pair { left: a(0), right: a(1), code: a(2) },
            "beta" => Coded::Beta { s: a(0), t: a(1), index: a(2), value: a(3) },
            "elem" => Coded::Elem { code: a(0), index: a(1), value: a(2) },
            _ => Coded::Tuple { code: a(0), parts: args[1..].to_vec() },
        };
        Ok(Formula::Coded(c))
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.expr()?;
        if self.eat_sym("<") {
            let rhs = self.expr()?;
            Ok(Formula::less(lhs, rhs))
        } else if self.eat_sym("<=") {
            let rhs = self.expr()?;
            Ok(Formula::not(Formula::less(rhs, lhs)))
        } else if self.eat_sym("=") {
            let rhs = self.expr()?;
            Ok(Formula::eq(lhs, rhs))
        } else {
            self.fail(&["`<`", "`<=`", "`=`"])
        }
    }

    // ---- terms

    fn expr(&mut self) -> PResult<Expr> {
        let mut acc = self.term()?;
        while self.eat_sym("+") {
            let rhs = self.term()?;
            acc = Expr::add(acc, rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut acc = self.atom()?;
        while self.eat_sym("*") || self.eat_sym("·") {
            let rhs = self.atom()?;
            acc = Expr::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::num(n))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Expr::Var(self.names.intern(&s)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => self.fail(&["numeral", "variable", "`(`"]),
        }
    }
}

fn run<T>(
    text: &str,
    names: &mut Names,
    f: impl FnOnce(&mut Parser<'_>) -> PResult<T>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(text, names)?;
    let result = f(&mut p).and_then(|v| p.expect_eof().map(|_| v));
    result.map_err(|_| p.error())
}

/// Parses a program, interning bare identifiers into a fresh table.
pub fn parse_program(text: &str) -> Result<Stmt, ParseError> {
    parse_program_with(text, &mut Names::new())
}

pub fn parse_program_with(text: &str, names: &mut Names) -> Result<Stmt, ParseError> {
    run(text, names, |p| p.program())
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &mut Names::new())
}

pub fn parse_formula_with(text: &str, names: &mut Names) -> Result<Formula, ParseError> {
    run(text, names, |p| p.formula())
}

pub fn parse_bexpr(text: &str, names: &mut Names) -> Result<BExpr, ParseError> {
    run(text, names, |p| p.guard())
}

pub fn parse_expr(text: &str, names: &mut Names) -> Result<Expr, ParseError> {
    run(text, names, |p| p.expr())
}
