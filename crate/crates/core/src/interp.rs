//! Big-step execution of while-programs over ℕ with an iteration budget.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::syntax::{program_vars, Atom, BExpr, Expr, Nat, Names, Stmt, Var};

/// A store: finitely many bindings, every other variable reads as 0.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct State {
    #[serde(with = "bindings")]
    bindings: BTreeMap<Var, Nat>,
}

mod bindings {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::syntax::{Nat, Var};

    pub fn serialize<S: Serializer>(b: &BTreeMap<Var, Nat>, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> =
            b.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Var, Nat>, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in m {
            let idx = crate::syntax::Names::explicit_index(&k)
                .ok_or_else(|| D::Error::custom(format!("bad variable `{k}`")))?;
            let val = Nat::parse_bytes(v.as_bytes(), 10)
                .ok_or_else(|| D::Error::custom(format!("bad value `{v}`")))?;
            out.insert(Var(idx), val);
        }
        Ok(out)
    }
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Nat)>) -> Self {
        let mut s = State::new();
        for (v, n) in pairs {
            s.set(v, n);
        }
        s
    }

    /// The state binding `xs[k]` to `values[k]`.
    pub fn from_slots(xs: &[Var], values: &[Nat]) -> Self {
        State::from_pairs(xs.iter().copied().zip(values.iter().cloned()))
    }

    pub fn get(&self, v: Var) -> Nat {
        self.bindings.get(&v).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, v: Var) -> Option<&Nat> {
        self.bindings.get(&v)
    }

    /// `w(a/x)`. Zero bindings are dropped so equal stores compare equal.
    pub fn set(&mut self, v: Var, n: Nat) {
        if n.is_zero() {
            self.bindings.remove(&v);
        } else {
            self.bindings.insert(v, n);
        }
    }

    pub fn with(&self, v: Var, n: Nat) -> State {
        let mut s = self.clone();
        s.set(v, n);
        s
    }

    pub fn slots(&self, xs: &[Var]) -> Vec<Nat> {
        xs.iter().map(|x| self.get(*x)).collect()
    }

    /// Nonzero bindings in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, &Nat)> {
        self.bindings.iter().map(|(v, n)| (*v, n))
    }

    /// Renders `xs` as `name=value` pairs separated by spaces.
    pub fn show(&self, xs: &[Var], names: &Names) -> String {
        xs.iter()
            .map(|x| format!("{}={}", names.show(*x), self.get(*x)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, n)) in self.bindings.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={n}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExecOutcome {
    /// `steps` is the number of loop-body entries performed.
    Terminated { state: State, steps: u64 },
    OutOfFuel,
}

impl ExecOutcome {
    pub fn state(&self) -> Option<&State> {
        match self {
            ExecOutcome::Terminated { state, .. } => Some(state),
            ExecOutcome::OutOfFuel => None,
        }
    }
}

/// The states `w_0, …, w_i` visited by one while-loop at its guard.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopTrace {
    pub states: Vec<State>,
}

impl LoopTrace {
    /// Number of iterations `i`.
    pub fn iterations(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trace is nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("program variable {0} is not among the listed slots")]
    MissingSlot(Var),
    #[error("statement is not a while-loop")]
    NotALoop,
    #[error("iteration budget exhausted")]
    OutOfFuel,
}

pub fn eval_expr(e: &Expr, w: &State) -> Nat {
    match e {
        Expr::Zero => Nat::zero(),
        Expr::One => Nat::from(1u32),
        Expr::Numeral(k) => k.clone(),
        Expr::Var(v) => w.get(*v),
        Expr::Add(a, b) => eval_expr(a, w) + eval_expr(b, w),
        Expr::Mul(a, b) => eval_expr(a, w) * eval_expr(b, w),
    }
}

pub fn holds_atom(a: &Atom, w: &State) -> bool {
    match a {
        Atom::Less(l, r) => eval_expr(l, w) < eval_expr(r, w),
        Atom::Eq(l, r) => eval_expr(l, w) == eval_expr(r, w),
    }
}

pub fn holds(b: &BExpr, w: &State) -> bool {
    match b {
        BExpr::Atom(a) => holds_atom(a, w),
        BExpr::Not(a) => !holds(a, w),
        BExpr::Imp(a, c) => !holds(a, w) || holds(c, w),
        BExpr::And(a, c) => holds(a, w) && holds(c, w),
        BExpr::Or(a, c) => holds(a, w) || holds(c, w),
    }
}

struct Machine<'t> {
    fuel: u64,
    steps: u64,
    trace: Option<&'t mut Vec<State>>,
}

impl Machine<'_> {
    fn run(&mut self, s: &Stmt, w: &mut State) -> Result<(), InterpError> {
        match s {
            Stmt::Assign(x, e) => {
                let v = eval_expr(e, w);
                w.set(*x, v);
                if let Some(t) = self.trace.as_deref_mut() {
                    t.push(w.clone());
                }
                Ok(())
            }
            Stmt::Seq(a, b) => {
                self.run(a, w)?;
                self.run(b, w)
            }
            Stmt::If(g, a, b) => {
                if holds(g, w) {
                    self.run(a, w)
                } else {
                    self.run(b, w)
                }
            }
            Stmt::While(g, body) => {
                while holds(g, w) {
                    if self.fuel == 0 {
                        return Err(InterpError::OutOfFuel);
                    }
                    self.fuel -= 1;
                    self.steps += 1;
                    self.run(body, w)?;
                }
                Ok(())
            }
        }
    }
}

/// Runs `s` from `w`; `fuel` bounds the total number of loop-body entries.
pub fn exec(s: &Stmt, w: &State, fuel: u64) -> ExecOutcome {
    let mut m = Machine { fuel, steps: 0, trace: None };
    let mut state = w.clone();
    match m.run(s, &mut state) {
        Ok(()) => ExecOutcome::Terminated { state, steps: m.steps },
        Err(_) => ExecOutcome::OutOfFuel,
    }
}

/// Like [`exec`], also returning the state after every assignment.
pub fn exec_traced(s: &Stmt, w: &State, fuel: u64) -> (Vec<State>, ExecOutcome) {
    let mut trace = vec![w.clone()];
    let mut m = Machine { fuel, steps: 0, trace: Some(&mut trace) };
    let mut state = w.clone();
    let r = m.run(s, &mut state);
    let steps = m.steps;
    let outcome = match r {
        Ok(()) => ExecOutcome::Terminated { state, steps },
        Err(_) => ExecOutcome::OutOfFuel,
    };
    (trace, outcome)
}

/// `f_S(a⃗)` read off at `xs`, or `None` when the budget runs out.
pub fn run_function(
    s: &Stmt,
    xs: &[Var],
    a: &[Nat],
    fuel: u64,
) -> Result<Option<Vec<Nat>>, InterpError> {
    if xs.len() != a.len() {
        return Err(InterpError::DimensionMismatch { expected: xs.len(), got: a.len() });
    }
    if let Some(v) = program_vars(s).into_iter().find(|v| !xs.contains(v)) {
        return Err(InterpError::MissingSlot(v));
    }
    let w = State::from_slots(xs, a);
    Ok(exec(s, &w, fuel).state().map(|st| st.slots(xs)))
}

/// The guard-point states of a while-loop started in `w`.
pub fn loop_trace(s: &Stmt, w: &State, fuel: u64) -> Result<LoopTrace, InterpError> {
    let Stmt::While(g, body) = s else {
        return Err(InterpError::NotALoop);
    };
    let mut states = vec![w.clone()];
    let mut remaining = fuel;
    let mut cur = w.clone();
    while holds(g, &cur) {
        if remaining == 0 {
            return Err(InterpError::OutOfFuel);
        }
        remaining -= 1;
        match exec(body, &cur, remaining) {
            ExecOutcome::Terminated { state, steps } => {
                remaining -= steps;
                cur = state;
                states.push(cur.clone());
            }
            ExecOutcome::OutOfFuel => return Err(InterpError::OutOfFuel),
        }
    }
    Ok(LoopTrace { states })
}
