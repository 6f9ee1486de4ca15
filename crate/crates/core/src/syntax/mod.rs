//! Abstract syntax for while-programs and first-order assertions over the
//! language of arithmetic `{+, ·, <, 0, 1}` with equality.

mod alpha;
mod export;
mod names;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One as _, ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

pub use alpha::alpha_eq;
pub use export::SExpr;
pub use names::Names;
pub use parse::{
    parse_bexpr, parse_expr, parse_formula, parse_formula_with, parse_program, parse_program_with,
    ParseError,
};
pub use print::{FormulaDisplay, StmtDisplay};
pub use subst::{substitute, Subst};

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// The program/assertion variable `x_index`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Terms: `e ::= 0 | 1 | x | e1+e2 | e1·e2`, plus decimal numerals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Expr {
    Zero,
    One,
    /// Sugar for `1+…+1`. Constructed through [`Expr::num`], so `k ≥ 2`.
    Numeral(#[serde(with = "nat_string")] Nat),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

/// Atomic comparisons shared by guards and assertions.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Atom {
    Less(Expr, Expr),
    Eq(Expr, Expr),
}

/// Quantifier-free boolean expressions used as program guards.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum BExpr {
    Atom(Atom),
    Not(Box<BExpr>),
    Imp(Box<BExpr>, Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

/// Graphs of the coding functions used to talk about sequence codes.
///
/// These are defined predicates: each one stands for its defining formula
/// in `L` (see [`Coded::expand`]); the evaluator interprets them through the
/// executable functions in [`crate::coding`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Coded {
    /// `code = ⟨left, right⟩`
    Pair { left: Expr, right: Expr, code: Expr },
    /// `value = β(s, t, index)`
    Beta { s: Expr, t: Expr, index: Expr, value: Expr },
    /// `value = (code)_index`
    Elem { code: Expr, index: Expr, value: Expr },
    /// `code = ⟨parts[0], …, parts[n-1]⟩`
    Tuple { code: Expr, parts: Vec<Expr> },
}

/// First-order formulas. `And`, `Or`, `Iff`, `Exists`, `BoundedForall` and
/// `Coded` are sugar over the primitive `Atom | Not | Imp | Forall`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    /// `∀v (v < bound → body)`; `v` never occurs in `bound`.
    BoundedForall(Var, Expr, Box<Formula>),
    Coded(Coded),
}

/// While-programs.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Stmt {
    Assign(Var, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    If(BExpr, Box<Stmt>, Box<Stmt>),
    While(BExpr, Box<Stmt>),
}

/// An asserted program `{pre} prog {post}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Triple {
    pub pre: Formula,
    pub prog: Stmt,
    pub post: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("bounded quantifier variable {0} occurs in its own bound")]
    BoundCapturesVar(Var),
    #[error("formula is not quantifier-free and cannot be used as a guard")]
    NotQuantifierFree,
}

pub(crate) mod nat_string {
    use super::Nat;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let text = String::deserialize(d)?;
        Nat::parse_bytes(text.as_bytes(), 10).ok_or_else(|| D::Error::custom("invalid numeral"))
    }
}

// ---------------------------------------------------------------------------
// Expr

impl Expr {
    /// Numeral constructor normalizing `0` and `1` to the constants.
    pub fn num(k: impl Into<Nat>) -> Expr {
        let k: Nat = k.into();
        if k.is_zero() {
            Expr::Zero
        } else if k.is_one() {
            Expr::One
        } else {
            Expr::Numeral(k)
        }
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// The value of a closed numeral-like term (`0`, `1`, `k`), if it is one.
    pub fn as_numeral(&self) -> Option<Nat> {
        match self {
            Expr::Zero => Some(Nat::zero()),
            Expr::One => Some(Nat::one()),
            Expr::Numeral(k) => Some(k.clone()),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Zero | Expr::One | Expr::Numeral(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn mentions(&self, v: Var) -> bool {
        match self {
            Expr::Zero | Expr::One | Expr::Numeral(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.mentions(v) || b.mentions(v),
        }
    }

    /// Rewrites numerals into terms over `0`, `1`, `+`, `·`: `1+…+1` for
    /// small values, binary expansion `(1+1)·k' (+1)` above that.
    pub fn unfold_numerals(&self) -> Expr {
        match self {
            Expr::Numeral(k) => unfold_numeral(k),
            Expr::Add(a, b) => Expr::add(a.unfold_numerals(), b.unfold_numerals()),
            Expr::Mul(a, b) => Expr::mul(a.unfold_numerals(), b.unfold_numerals()),
            other => other.clone(),
        }
    }

}

fn unfold_numeral(k: &Nat) -> Expr {
    if let Some(n) = k.to_u64().filter(|n| *n <= 8) {
        if n == 0 {
            return Expr::Zero;
        }
        let mut e = Expr::One;
        for _ in 1..n {
            e = Expr::add(e, Expr::One);
        }
        return e;
    }
    let two = Expr::add(Expr::One, Expr::One);
    let half = Expr::mul(two, unfold_numeral(&(k >> 1u32)));
    if k.bit(0) {
        Expr::add(half, Expr::One)
    } else {
        half
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::Var(v)
    }
}

// ---------------------------------------------------------------------------
// Atom / BExpr

impl Atom {
    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Atom::Less(a, b) | Atom::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn map_exprs(&self, f: &mut impl FnMut(&Expr) -> Expr) -> Atom {
        match self {
            Atom::Less(a, b) => Atom::Less(f(a), f(b)),
            Atom::Eq(a, b) => Atom::Eq(f(a), f(b)),
        }
    }
}

impl BExpr {
    pub fn less(a: Expr, b: Expr) -> BExpr {
        BExpr::Atom(Atom::Less(a, b))
    }

    pub fn eq(a: Expr, b: Expr) -> BExpr {
        BExpr::Atom(Atom::Eq(a, b))
    }

    pub fn not(b: BExpr) -> BExpr {
        BExpr::Not(Box::new(b))
    }

    pub fn imp(a: BExpr, b: BExpr) -> BExpr {
        BExpr::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: BExpr, b: BExpr) -> BExpr {
        BExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BExpr, b: BExpr) -> BExpr {
        BExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            BExpr::Atom(a) => a.collect_vars(out),
            BExpr::Not(b) => b.collect_vars(out),
            BExpr::Imp(a, b) | BExpr::And(a, b) | BExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn map_exprs(&self, f: &mut impl FnMut(&Expr) -> Expr) -> BExpr {
        match self {
            BExpr::Atom(a) => BExpr::Atom(a.map_exprs(f)),
            BExpr::Not(b) => BExpr::not(b.map_exprs(f)),
            BExpr::Imp(a, b) => BExpr::imp(a.map_exprs(f), b.map_exprs(f)),
            BExpr::And(a, b) => BExpr::and(a.map_exprs(f), b.map_exprs(f)),
            BExpr::Or(a, b) => BExpr::or(a.map_exprs(f), b.map_exprs(f)),
        }
    }

    /// The guard as an assertion, with connectives lifted to formula level.
    pub fn to_formula(&self) -> Formula {
        match self {
            BExpr::Atom(a) => Formula::Atom(a.clone()),
            BExpr::Not(b) => Formula::not(b.to_formula()),
            BExpr::Imp(a, b) => Formula::imp(a.to_formula(), b.to_formula()),
            BExpr::And(a, b) => Formula::and(a.to_formula(), b.to_formula()),
            BExpr::Or(a, b) => Formula::or(a.to_formula(), b.to_formula()),
        }
    }
}

impl TryFrom<&Formula> for BExpr {
    type Error = SyntaxError;

    fn try_from(f: &Formula) -> Result<Self, Self::Error> {
        Ok(match f {
            Formula::Atom(a) => BExpr::Atom(a.clone()),
            Formula::Not(a) => BExpr::not(a.as_ref().try_into()?),
            Formula::Imp(a, b) => BExpr::imp(a.as_ref().try_into()?, b.as_ref().try_into()?),
            Formula::And(a, b) => BExpr::and(a.as_ref().try_into()?, b.as_ref().try_into()?),
            Formula::Or(a, b) => BExpr::or(a.as_ref().try_into()?, b.as_ref().try_into()?),
            Formula::Iff(a, b) => {
                let a: BExpr = a.as_ref().try_into()?;
                let b: BExpr = b.as_ref().try_into()?;
                BExpr::and(BExpr::imp(a.clone(), b.clone()), BExpr::imp(b, a))
            }
            Formula::Forall(..)
            | Formula::Exists(..)
            | Formula::BoundedForall(..)
            | Formula::Coded(_) => return Err(SyntaxError::NotQuantifierFree),
        })
    }
}

// ---------------------------------------------------------------------------
// Coded

impl Coded {
    pub fn args(&self) -> Vec<&Expr> {
        match self {
            Coded::Pair { left, right, code } => vec![left, right, code],
            Coded::Beta { s, t, index, value } => vec![s, t, index, value],
            Coded::Elem { code, index, value } => vec![code, index, value],
            Coded::Tuple { code, parts } => std::iter::once(code).chain(parts.iter()).collect(),
        }
    }

    pub fn map_exprs(&self, f: &mut impl FnMut(&Expr) -> Expr) -> Coded {
        match self {
            Coded::Pair { left, right, code } => Coded::Pair {
                left: f(left),
                right: f(right),
                code: f(code),
            },
            Coded::Beta { s, t, index, value } => Coded::Beta {
                s: f(s),
                t: f(t),
                index: f(index),
                value: f(value),
            },
            Coded::Elem { code, index, value } => Coded::Elem {
                code: f(code),
                index: f(index),
                value: f(value),
            },
            Coded::Tuple { code, parts } => Coded::Tuple {
                code: f(code),
                parts: parts.iter().map(|p| f(p)).collect(),
            },
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for a in self.args() {
            a.collect_vars(out);
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Coded::Pair { .. } => "pair",
            Coded::Beta { .. } => "beta",
            Coded::Elem { .. } => "elem",
            Coded::Tuple { .. } => "untuple",
        }
    }

    /// The defining formula in `L` (recursively expanded, no `Coded` nodes).
    pub fn expand(&self) -> Formula {
        crate::coding::expand_coded(self)
    }
}

// ---------------------------------------------------------------------------
// Formula

impl Formula {
    pub fn less(a: Expr, b: Expr) -> Formula {
        Formula::Atom(Atom::Less(a, b))
    }

    pub fn eq(a: Expr, b: Expr) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }

    /// `0 = 0`, used for empty conjunctions.
    pub fn truth() -> Formula {
        Formula::eq(Expr::Zero, Expr::Zero)
    }

    /// `0 < 0`.
    pub fn falsity() -> Formula {
        Formula::less(Expr::Zero, Expr::Zero)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn exists_many(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |acc, v| Formula::exists(*v, acc))
    }

    pub fn forall_many(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |acc, v| Formula::forall(*v, acc))
    }

    pub fn bounded_forall(v: Var, bound: Expr, body: Formula) -> Result<Formula, SyntaxError> {
        if bound.mentions(v) {
            return Err(SyntaxError::BoundCapturesVar(v));
        }
        Ok(Formula::BoundedForall(v, bound, Box::new(body)))
    }

    /// Right-nested conjunction; `0 = 0` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::truth();
        };
        while let Some(p) = parts.pop() {
            acc = Formula::and(p, acc);
        }
        acc
    }

    /// Right-nested disjunction; `0 < 0` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::falsity();
        };
        while let Some(p) = parts.pop() {
            acc = Formula::or(p, acc);
        }
        acc
    }

    /// `xs[k] = es[k]` for every k.
    pub fn tuple_eq(xs: &[Var], es: &[Expr]) -> Formula {
        Formula::conj(xs.iter().zip(es).map(|(x, e)| Formula::eq(Expr::Var(*x), e.clone())))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let add_expr = |e: &Expr, bound: &Vec<Var>, out: &mut BTreeSet<Var>| {
            let mut vs = BTreeSet::new();
            e.collect_vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Atom(Atom::Less(a, b)) | Formula::Atom(Atom::Eq(a, b)) => {
                add_expr(a, bound, out);
                add_expr(b, bound, out);
            }
            Formula::Coded(c) => {
                for a in c.args() {
                    add_expr(a, bound, out);
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(*v);
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::BoundedForall(v, t, body) => {
                add_expr(t, bound, out);
                bound.push(*v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(a) => a.collect_vars(out),
            Formula::Coded(c) => c.collect_vars(out),
            Formula::Not(a) => a.collect_all(out),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                out.insert(*v);
                body.collect_all(out);
            }
            Formula::BoundedForall(v, t, body) => {
                out.insert(*v);
                t.collect_vars(out);
                body.collect_all(out);
            }
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        self.all_vars().iter().next_back().map(|v| v.0)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Universal closure over the free variables, in ascending order.
    pub fn universal_closure(&self) -> Formula {
        let fv: Vec<Var> = self.free_vars().into_iter().collect();
        Formula::forall_many(&fv, self.clone())
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Coded(_) => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) | Formula::BoundedForall(..) => false,
        }
    }

    /// Number of nodes, a rough size measure for emitted formulas.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Coded(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
            Formula::BoundedForall(_, _, body) => 1 + body.size(),
        }
    }

    pub fn contains_coded(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Coded(_) => true,
            Formula::Not(a) => a.contains_coded(),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                a.contains_coded() || b.contains_coded()
            }
            Formula::Forall(_, body)
            | Formula::Exists(_, body)
            | Formula::BoundedForall(_, _, body) => body.contains_coded(),
        }
    }

    /// Replaces every defined coding predicate by its defining formula.
    pub fn expand_coded(&self) -> Formula {
        self.map_bottom_up(&|f| match f {
            Formula::Coded(c) => c.expand(),
            other => other,
        })
    }

    fn map_bottom_up(&self, f: &impl Fn(Formula) -> Formula) -> Formula {
        let rebuilt = match self {
            Formula::Atom(_) | Formula::Coded(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.map_bottom_up(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::And(a, b) => Formula::and(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::Or(a, b) => Formula::or(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_bottom_up(f), b.map_bottom_up(f)),
            Formula::Forall(v, body) => Formula::forall(*v, body.map_bottom_up(f)),
            Formula::Exists(v, body) => Formula::exists(*v, body.map_bottom_up(f)),
            Formula::BoundedForall(v, t, body) => {
                Formula::BoundedForall(*v, t.clone(), Box::new(body.map_bottom_up(f)))
            }
        };
        f(rebuilt)
    }

    /// Rewrites into the primitive connectives of `L`: `¬`, `→`, `∀`, `<`.
    ///
    /// Equality becomes `¬(a<b) ∧ ¬(b<a)`, `∃` becomes `¬∀¬`, numerals are
    /// unfolded and coding predicates are expanded.
    pub fn to_strict(&self) -> Formula {
        fn strict_and(a: Formula, b: Formula) -> Formula {
            Formula::not(Formula::imp(a, Formula::not(b)))
        }
        fn go(f: &Formula) -> Formula {
            match f {
                Formula::Atom(Atom::Less(a, b)) => {
                    Formula::less(a.unfold_numerals(), b.unfold_numerals())
                }
                Formula::Atom(Atom::Eq(a, b)) => {
                    let (a, b) = (a.unfold_numerals(), b.unfold_numerals());
                    strict_and(
                        Formula::not(Formula::less(a.clone(), b.clone())),
                        Formula::not(Formula::less(b, a)),
                    )
                }
                Formula::Coded(c) => go(&c.expand()),
                Formula::Not(a) => Formula::not(go(a)),
                Formula::Imp(a, b) => Formula::imp(go(a), go(b)),
                Formula::And(a, b) => strict_and(go(a), go(b)),
                Formula::Or(a, b) => Formula::imp(Formula::not(go(a)), go(b)),
                Formula::Iff(a, b) => {
                    let (a, b) = (go(a), go(b));
                    strict_and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
                }
                Formula::Forall(v, body) => Formula::forall(*v, go(body)),
                Formula::Exists(v, body) => {
                    Formula::not(Formula::forall(*v, Formula::not(go(body))))
                }
                Formula::BoundedForall(v, t, body) => Formula::forall(
                    *v,
                    Formula::imp(
                        Formula::less(Expr::Var(*v), t.unfold_numerals()),
                        go(body),
                    ),
                ),
            }
        }
        go(self)
    }

    /// Replaces `BoundedForall` by its expansion `∀v (v < t → φ)`.
    pub fn unfold_bounded(&self) -> Formula {
        self.map_bottom_up(&|f| match f {
            Formula::BoundedForall(v, t, body) => {
                Formula::forall(v, Formula::imp(Formula::less(Expr::Var(v), t), *body))
            }
            other => other,
        })
    }

    /// True when every universal quantifier (by polarity) is bounded.
    pub fn is_sigma1(&self) -> bool {
        fn go(f: &Formula, positive: bool) -> bool {
            match f {
                Formula::Atom(_) => true,
                // Every coding predicate has a definition whose quantifiers
                // are bounded by one of its arguments.
                Formula::Coded(_) => true,
                Formula::Not(a) => go(a, !positive),
                Formula::Imp(a, b) => go(a, !positive) && go(b, positive),
                Formula::And(a, b) | Formula::Or(a, b) => go(a, positive) && go(b, positive),
                Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
                Formula::Forall(_, body) => !positive && go(body, positive),
                Formula::Exists(_, body) => positive && go(body, positive),
                Formula::BoundedForall(_, _, body) => go(body, positive),
            }
        }
        go(self, true)
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Self {
        Formula::Atom(a)
    }
}

impl From<&BExpr> for Formula {
    fn from(b: &BExpr) -> Self {
        b.to_formula()
    }
}

// ---------------------------------------------------------------------------
// Stmt

impl Stmt {
    pub fn assign(x: Var, e: Expr) -> Stmt {
        Stmt::Assign(x, e)
    }

    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    pub fn if_(b: BExpr, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::If(b, Box::new(s1), Box::new(s2))
    }

    pub fn while_(b: BExpr, body: Stmt) -> Stmt {
        Stmt::While(b, Box::new(body))
    }

    /// Right-nested sequence of statements.
    pub fn block(stmts: impl IntoIterator<Item = Stmt>) -> Stmt {
        let mut stmts: Vec<Stmt> = stmts.into_iter().collect();
        let mut acc = stmts.pop().expect("empty statement block");
        while let Some(s) = stmts.pop() {
            acc = Stmt::seq(s, acc);
        }
        acc
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Stmt::Assign(x, e) => {
                out.insert(*x);
                e.collect_vars(out);
            }
            Stmt::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::If(g, a, b) => {
                g.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Stmt::While(g, body) => {
                g.collect_vars(out);
                body.collect_vars(out);
            }
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out.iter().next_back().map(|v| v.0)
    }

    /// Re-associates sequential composition to the right, the shape the
    /// parser produces.
    pub fn normalize(&self) -> Stmt {
        match self {
            Stmt::Assign(..) => self.clone(),
            Stmt::Seq(a, b) => {
                let mut items = Vec::new();
                flatten_seq(a, &mut items);
                flatten_seq(b, &mut items);
                Stmt::block(items.into_iter().map(|s| s.normalize()))
            }
            Stmt::If(g, a, b) => Stmt::if_(g.clone(), a.normalize(), b.normalize()),
            Stmt::While(g, body) => Stmt::while_(g.clone(), body.normalize()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names) -> StmtDisplay<'a> {
        StmtDisplay::new(self, Some(names))
    }
}

fn flatten_seq<'a>(s: &'a Stmt, out: &mut Vec<&'a Stmt>) {
    match s {
        Stmt::Seq(a, b) => {
            flatten_seq(a, out);
            flatten_seq(b, out);
        }
        other => out.push(other),
    }
}

/// All variables occurring in `prog`, in ascending index order.
pub fn program_vars(prog: &Stmt) -> Vec<Var> {
    let mut out = BTreeSet::new();
    prog.collect_vars(&mut out);
    out.into_iter().collect()
}

/// `count` distinct variables with indices above every index in `avoid`.
pub fn fresh_vars<'a>(avoid: impl IntoIterator<Item = &'a Var>, count: usize) -> Vec<Var> {
    let start = avoid.into_iter().map(|v| v.0 + 1).max().unwrap_or(0);
    (0..count as u32).map(|k| Var(start + k)).collect()
}

/// Hands out variables above a floor, one after another.
#[derive(Debug, Clone)]
pub struct FreshGen {
    next: u32,
}

impl FreshGen {
    pub fn above(max_used: Option<u32>) -> Self {
        FreshGen { next: max_used.map_or(0, |m| m + 1) }
    }

    pub fn from_sets<'a>(sets: impl IntoIterator<Item = &'a BTreeSet<Var>>) -> Self {
        let max = sets.into_iter().filter_map(|s| s.iter().next_back()).map(|v| v.0).max();
        FreshGen::above(max)
    }

    pub fn var(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    pub fn vars(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.var()).collect()
    }

    pub fn floor(&self) -> u32 {
        self.next
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(f, self, None, 0)
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&FormulaDisplay::new(&self.to_formula(), None), f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&FormulaDisplay::new(self, None), f)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&StmtDisplay::new(self, None), f)
    }
}

impl Formula {
    pub fn display<'a>(&'a self, names: &'a Names) -> FormulaDisplay<'a> {
        FormulaDisplay::new(self, Some(names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Var {
        Var(i)
    }

    #[test]
    fn fresh_vars_examples() {
        assert_eq!(fresh_vars(&[x(0), x(5)], 2), vec![x(6), x(7)]);
        assert_eq!(fresh_vars(&[], 1), vec![x(0)]);
        assert_eq!(fresh_vars(&[x(9)], 3), vec![x(10), x(11), x(12)]);
    }

    #[test]
    fn program_vars_ascending() {
        let s = Stmt::seq(
            Stmt::assign(x(3), Expr::Var(x(1))),
            Stmt::assign(x(1), Expr::Var(x(2))),
        );
        assert_eq!(program_vars(&s), vec![x(1), x(2), x(3)]);
        assert_eq!(program_vars(&Stmt::assign(x(1), Expr::Zero)), vec![x(1)]);
    }

    #[test]
    fn numerals_normalize() {
        assert_eq!(Expr::num(0u32), Expr::Zero);
        assert_eq!(Expr::num(1u32), Expr::One);
        assert_eq!(Expr::num(3u32).unfold_numerals().to_string(), "1 + 1 + 1");
    }

    #[test]
    fn bounded_forall_rejects_capture() {
        let r = Formula::bounded_forall(x(0), Expr::Var(x(0)), Formula::truth());
        assert_eq!(r, Err(SyntaxError::BoundCapturesVar(x(0))));
    }

    #[test]
    fn free_vars_of_sugar_match_expansion() {
        let f = Formula::exists(
            x(2),
            Formula::and(
                Formula::eq(Expr::Var(x(2)), Expr::Var(x(0))),
                Formula::bounded_forall(x(3), Expr::Var(x(1)), Formula::less(Expr::Var(x(3)), Expr::Var(x(2))))
                    .unwrap(),
            ),
        );
        assert_eq!(f.free_vars(), f.to_strict().free_vars());
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![x(0), x(1)]);
    }

    #[test]
    fn sigma1_shape() {
        let bounded = Formula::exists(
            x(1),
            Formula::bounded_forall(x(2), Expr::Var(x(1)), Formula::truth()).unwrap(),
        );
        assert!(bounded.is_sigma1());
        assert!(!Formula::forall(x(1), Formula::truth()).is_sigma1());
        assert!(!Formula::not(Formula::exists(x(1), Formula::truth())).is_sigma1());
    }
}
