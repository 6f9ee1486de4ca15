use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Var;

/// Interning table for bare identifiers such as `x`, `y`, `count`.
///
/// Identifiers of the form `x<digits>` always denote the variable with that
/// index and are never interned. Every other identifier receives the next
/// index above all indices seen so far, in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Names {
    by_name: BTreeMap<String, Var>,
    order: Vec<(String, Var)>,
    next: u32,
}

impl Names {
    pub fn new() -> Self {
        Self::default()
    }

    /// A table with `names` interned in the given order.
    pub fn declared<S: AsRef<str>>(names: &[S]) -> Self {
        let mut table = Names::new();
        for n in names {
            table.intern(n.as_ref());
        }
        table
    }

    /// The explicit index of an `x<digits>` identifier.
    pub fn explicit_index(name: &str) -> Option<u32> {
        let digits = name.strip_prefix('x')?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return None;
        }
        digits.parse().ok()
    }

    /// Ensures later interned names get indices above `index`.
    pub fn reserve(&mut self, index: u32) {
        self.next = self.next.max(index + 1);
    }

    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(k) = Names::explicit_index(name) {
            self.reserve(k);
            return Var(k);
        }
        if let Some(v) = self.by_name.get(name) {
            return *v;
        }
        let v = Var(self.next);
        self.next += 1;
        self.by_name.insert(name.to_string(), v);
        self.order.push((name.to_string(), v));
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        Names::explicit_index(name).map(Var).or_else(|| self.by_name.get(name).copied())
    }

    pub fn name_of(&self, v: Var) -> Option<&str> {
        self.order.iter().find(|(_, w)| *w == v).map(|(n, _)| n.as_str())
    }

    /// Interned identifiers with their variables, in interning order.
    pub fn entries(&self) -> &[(String, Var)] {
        &self.order
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Display name: the interned identifier, or `x<k>`.
    pub fn show(&self, v: Var) -> String {
        self.name_of(v).map_or_else(|| v.to_string(), str::to_string)
    }
}
