//! Cantor pairing, tuples, the β-function and sequence codes, both as
//! functions on naturals and as defining formulas in `L`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::syntax::{Coded, Expr, Formula, FreshGen, Nat, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("tuples must have at least one component")]
    EmptyTuple,
    #[error("cannot encode the empty sequence")]
    EmptySequence,
    #[error("variable {0} is used for two different arguments")]
    VariableClash(Var),
}

/// Cantor pairing `⟨x, y⟩ = (x+y)(x+y+1)/2 + x`.
pub fn pair(x: &Nat, y: &Nat) -> Nat {
    let s = x + y;
    (&s * (&s + 1u32) >> 1u32) + x
}

/// Inverse of [`pair`]: returns `(L(z), R(z))`.
pub fn unpair(z: &Nat) -> (Nat, Nat) {
    // Largest w with w(w+1)/2 <= z.
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let tri = &w * (&w + 1u32) >> 1u32;
    let x = z - tri;
    let y = &w - &x;
    (x, y)
}

/// Right-nested tuple `⟨a1, ⟨a2, …, an⟩⟩`; a 1-tuple is its component.
pub fn tuple_encode(parts: &[Nat]) -> Result<Nat, CodingError> {
    let (last, init) = parts.split_last().ok_or(CodingError::EmptyTuple)?;
    Ok(init.iter().rev().fold(last.clone(), |acc, a| pair(a, &acc)))
}

pub fn tuple_decode(z: &Nat, n: usize) -> Result<Vec<Nat>, CodingError> {
    if n == 0 {
        return Err(CodingError::EmptyTuple);
    }
    let mut out = Vec::with_capacity(n);
    let mut rest = z.clone();
    for _ in 1..n {
        let (a, r) = unpair(&rest);
        out.push(a);
        rest = r;
    }
    out.push(rest);
    Ok(out)
}

/// The modulus `1 + (i+1)·t` used by [`beta`].
pub fn beta_modulus(t: &Nat, i: &Nat) -> Nat {
    (i + 1u32) * t + 1u32
}

/// Gödel's β-function: `s mod (1 + (i+1)·t)`.
pub fn beta(s: &Nat, t: &Nat, i: &Nat) -> Nat {
    s % beta_modulus(t, i)
}

/// Encodes a nonempty sequence as `⟨s, t⟩` with `β(s, t, i) = a_i`.
///
/// `t = n!·(max a + 1)` makes the moduli `1 + (i+1)t` (`i < n`) pairwise
/// coprime and larger than every entry; `s` is found by the Chinese
/// remainder construction.
pub fn seq_encode(a: &[Nat]) -> Result<Nat, CodingError> {
    if a.is_empty() {
        return Err(CodingError::EmptySequence);
    }
    let n = a.len();
    let max = a.iter().max().expect("nonempty").clone();
    let fact = (1..=n as u64).fold(Nat::one(), |acc, k| acc * k);
    let t = fact * (max + 1u32);
    let mut s = BigInt::zero();
    let mut m = BigInt::one();
    for (i, ai) in a.iter().enumerate() {
        let mi = BigInt::from_biguint(Sign::Plus, beta_modulus(&t, &Nat::from(i)));
        let ai = BigInt::from_biguint(Sign::Plus, ai.clone());
        // s + m·k ≡ a_i (mod m_i)
        let inv = mod_inverse(&m, &mi);
        let k = ((&ai - &s) * inv).mod_floor(&mi);
        s += &m * k;
        m *= mi;
    }
    let s = s.to_biguint().expect("CRT solution is nonnegative");
    Ok(pair(&s, &t))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "moduli must be coprime");
    e.x.mod_floor(m)
}

/// `(c)_i = β(L(c), R(c), i)`.
pub fn seq_elem(c: &Nat, i: &Nat) -> Nat {
    let (s, t) = unpair(c);
    beta(&s, &t, i)
}

// ---------------------------------------------------------------------------
// Defining formulas

fn two() -> Expr {
    Expr::num(2u32)
}

/// `(x+y)·(x+y+1) + 2·x = 2·z`, the graph of pairing without division.
pub fn pair_graph(x: &Expr, y: &Expr, z: &Expr) -> Formula {
    let s = Expr::add(x.clone(), y.clone());
    Formula::eq(
        Expr::add(
            Expr::mul(s.clone(), Expr::add(s, Expr::One)),
            Expr::mul(two(), x.clone()),
        ),
        Expr::mul(two(), z.clone()),
    )
}

/// `s = q·m + y ∧ y < m` with `m = 1 + (i+1)·t` and `q` supplied.
pub fn beta_matrix(s: &Expr, t: &Expr, i: &Expr, y: &Expr, q: &Expr) -> Formula {
    let m = Expr::add(Expr::One, Expr::mul(Expr::add(i.clone(), Expr::One), t.clone()));
    Formula::and(
        Formula::eq(s.clone(), Expr::add(Expr::mul(q.clone(), m.clone()), y.clone())),
        Formula::less(y.clone(), m),
    )
}

/// `∃q (s = q·(1+(i+1)·t) + y ∧ y < 1+(i+1)·t)`.
pub fn beta_graph(s: &Expr, t: &Expr, i: &Expr, y: &Expr, fresh: &mut FreshGen) -> Formula {
    let q = fresh.var();
    Formula::exists(q, beta_matrix(s, t, i, y, &Expr::Var(q)))
}

/// `⟨s,t⟩ = c ∧ β(s,t,i) = y` with the witnesses `s`, `t`, `q` supplied.
pub fn elem_matrix(c: &Expr, i: &Expr, y: &Expr, s: &Expr, t: &Expr, q: &Expr) -> Formula {
    Formula::and(pair_graph(s, t, c), beta_matrix(s, t, i, y, q))
}

/// `∃s ∃t (⟨s,t⟩ = c ∧ ∃q β-matrix)`.
pub fn elem_graph(c: &Expr, i: &Expr, y: &Expr, fresh: &mut FreshGen) -> Formula {
    let s = fresh.var();
    let t = fresh.var();
    let (se, te) = (Expr::Var(s), Expr::Var(t));
    Formula::exists_many(
        &[s, t],
        Formula::and(pair_graph(&se, &te, c), beta_graph(&se, &te, i, y, fresh)),
    )
}

/// Chained pairing constraints `⟨u1, r1⟩ = z ∧ ⟨u2, r2⟩ = r1 ∧ … ∧ ⟨u_{n-1}, u_n⟩ = r_{n-2}`
/// with the intermediate codes `rs` (length `n-2` for `n ≥ 2`) supplied.
pub fn tuple_matrix(z: &Expr, us: &[Expr], rs: &[Expr]) -> Formula {
    assert!(!us.is_empty(), "tuples must have at least one component");
    let n = us.len();
    if n == 1 {
        return Formula::eq(z.clone(), us[0].clone());
    }
    assert_eq!(rs.len(), n - 2, "need one intermediate code per inner pair");
    let mut parts = Vec::with_capacity(n - 1);
    let mut code = z.clone();
    for k in 0..n - 1 {
        let rest = if k == n - 2 { us[n - 1].clone() } else { rs[k].clone() };
        parts.push(pair_graph(&us[k], &rest, &code));
        code = rest;
    }
    Formula::conj(parts)
}

/// `z = ⟨u1, …, un⟩`, with one existential per intermediate code.
pub fn tuple_graph(z: &Expr, us: &[Expr], fresh: &mut FreshGen) -> Formula {
    assert!(!us.is_empty(), "tuples must have at least one component");
    let n = us.len();
    if n <= 2 {
        return tuple_matrix(z, us, &[]);
    }
    let rs = fresh.vars(n - 2);
    let re: Vec<Expr> = rs.iter().map(|r| Expr::Var(*r)).collect();
    Formula::exists_many(&rs, tuple_matrix(z, us, &re))
}

fn distinct(vars: &[Var]) -> Result<(), CodingError> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(*v) {
            return Err(CodingError::VariableClash(*v));
        }
    }
    Ok(())
}

fn fresh_for(vars: &[Var]) -> FreshGen {
    FreshGen::above(vars.iter().map(|v| v.0).max())
}

/// Defining formula of `z = ⟨x, y⟩`, free in exactly `x, y, z`.
pub fn pair_formula(x: Var, y: Var, z: Var) -> Result<Formula, CodingError> {
    distinct(&[x, y, z])?;
    Ok(pair_graph(&x.into(), &y.into(), &z.into()))
}

/// Defining formula of `y = β(s, t, i)`.
pub fn beta_formula(s: Var, t: Var, i: Var, y: Var) -> Result<Formula, CodingError> {
    distinct(&[s, t, i, y])?;
    let mut fresh = fresh_for(&[s, t, i, y]);
    Ok(beta_graph(&s.into(), &t.into(), &i.into(), &y.into(), &mut fresh))
}

/// Defining formula of `y = (c)_i`.
pub fn elem_formula(c: Var, i: Var, y: Var) -> Result<Formula, CodingError> {
    distinct(&[c, i, y])?;
    let mut fresh = fresh_for(&[c, i, y]);
    Ok(elem_graph(&c.into(), &i.into(), &y.into(), &mut fresh))
}

/// Defining formula of `z = ⟨u1, …, un⟩`.
pub fn tuple_decode_formula(z: Var, us: &[Var]) -> Result<Formula, CodingError> {
    if us.is_empty() {
        return Err(CodingError::EmptyTuple);
    }
    let mut all = vec![z];
    all.extend_from_slice(us);
    distinct(&all)?;
    let mut fresh = fresh_for(&all);
    let ue: Vec<Expr> = us.iter().map(|u| Expr::Var(*u)).collect();
    Ok(tuple_graph(&z.into(), &ue, &mut fresh))
}

/// The defining formula of a coding predicate, with auxiliary quantified
/// variables above every variable of its arguments.
pub fn expand_coded(c: &Coded) -> Formula {
    let mut vars = BTreeSet::new();
    c.collect_vars(&mut vars);
    let mut fresh = FreshGen::from_sets([&vars]);
    match c {
        Coded::Pair { left, right, code } => pair_graph(left, right, code),
        Coded::Beta { s, t, index, value } => beta_graph(s, t, index, value, &mut fresh),
        Coded::Elem { code, index, value } => elem_graph(code, index, value, &mut fresh),
        Coded::Tuple { code, parts } => tuple_graph(code, parts, &mut fresh),
    }
}
