use std::fmt::Write as _;

use hoarith::hoare::formula_to_smt;
use hoarith::interp::State;
use hoarith::syntax::{Formula, Names, SExpr, Var};
use serde_json::{json, Map, Value};

pub fn var_names(xs: &[Var], names: &Names) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(names.show(*x))).collect())
}

/// `{"name": "value", ...}` over `xs`; values are decimal strings.
pub fn state_json(st: &State, xs: &[Var], names: &Names) -> Value {
    let mut m = Map::new();
    for x in xs {
        m.insert(names.show(*x), Value::String(st.get(*x).to_string()));
    }
    Value::Object(m)
}

pub fn formula_json(phi: &Formula, names: &Names) -> Value {
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    json!({
        "formula": phi.display(names).to_string(),
        "sexpr": phi.to_sexpr(),
        "free": var_names(&free, names),
        "size": phi.size(),
    })
}

/// A script asserting `phi` over nonnegative integers, with the
/// identifier table in comments.
pub fn smt_script(phi: &Formula, names: &Names) -> String {
    let mut out = String::new();
    for (name, v) in names.entries() {
        writeln!(out, "; {v} = {name}").unwrap();
    }
    out.push_str("(set-logic NIA)\n");
    for v in phi.free_vars() {
        writeln!(out, "(declare-const {v} Int)").unwrap();
        writeln!(out, "(assert (>= {v} 0))").unwrap();
    }
    writeln!(out, "(assert {})", formula_to_smt(phi)).unwrap();
    out.push_str("(check-sat)\n");
    out
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}
