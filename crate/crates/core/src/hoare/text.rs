//! Serde adapters storing syntax as surface text.

use serde::{de::Error, Deserialize, Deserializer, Serializer};

use crate::syntax::{parse_expr, parse_formula, Expr, Names, Var};

pub mod formula {
    use super::*;
    use crate::syntax::Formula;

    pub fn serialize<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&f.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(D::Error::custom)
    }
}

pub mod expr {
    use super::*;

    pub fn serialize<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&e.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text, &mut Names::new()).map_err(D::Error::custom)
    }
}

pub mod var {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Var, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Var, D::Error> {
        let text = String::deserialize(d)?;
        match parse_expr(&text, &mut Names::new()).map_err(D::Error::custom)? {
            Expr::Var(v) => Ok(v),
            _ => Err(D::Error::custom(format!("expected a variable, found `{text}`"))),
        }
    }
}
