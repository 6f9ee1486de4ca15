//! Translation of formulas into a negation-normal IR over numbered slots.
//!
//! Every binder gets its own slot, so nested existentials can be merged into
//! one block without renaming. Universal quantifiers become negated blocks
//! (`∀v φ ≡ ¬∃v ¬φ`); bounded universals are kept as exact loops.

use std::collections::BTreeMap;

use crate::syntax::{Atom, Coded, Expr, Formula, Nat, Var};

pub(crate) type Slot = usize;

#[derive(Debug, Clone)]
pub(crate) enum Term {
    Const(Nat),
    Slot(Slot),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub(crate) fn mentions(&self, s: Slot) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Slot(t) => *t == s,
            Term::Add(a, b) | Term::Mul(a, b) => a.mentions(s) || b.mentions(s),
        }
    }

    fn collect(&self, out: &mut Vec<Slot>) {
        match self {
            Term::Const(_) => {}
            Term::Slot(s) => out.push(*s),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CodedKind {
    Pair,
    Beta,
    Elem,
    Tuple,
}

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Const(bool),
    Less { l: Term, r: Term, positive: bool, slots: Vec<Slot> },
    Eq { l: Term, r: Term, positive: bool, slots: Vec<Slot> },
    /// Coding predicate; argument order as in [`Coded::args`].
    Coded { kind: CodedKind, args: Vec<Term>, positive: bool, slots: Vec<Slot> },
    And(Vec<Node>, Vec<Slot>),
    Or(Vec<Node>, Vec<Slot>),
    Block(Block),
    NotBlock(Block),
    /// `∀var < bound. body`
    BForall { var: Slot, bound: Term, body: Box<Node>, slots: Vec<Slot> },
}

/// `∃vars (c1 ∧ … ∧ cn)`.
#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub vars: Vec<Slot>,
    pub conjuncts: Vec<Node>,
    pub slots: Vec<Slot>,
}

impl Node {
    /// Free slots, sorted and deduplicated.
    pub(crate) fn slots(&self) -> &[Slot] {
        match self {
            Node::Const(_) => &[],
            Node::Less { slots, .. }
            | Node::Eq { slots, .. }
            | Node::Coded { slots, .. }
            | Node::And(_, slots)
            | Node::Or(_, slots)
            | Node::BForall { slots, .. } => slots,
            Node::Block(b) | Node::NotBlock(b) => &b.slots,
        }
    }

    pub(crate) fn mentions(&self, s: Slot) -> bool {
        self.slots().binary_search(&s).is_ok()
    }

    /// Rough evaluation cost class, used to try cheap conjuncts first.
    pub(crate) fn cost(&self) -> u8 {
        match self {
            Node::Const(_) | Node::Less { .. } | Node::Eq { .. } => 0,
            Node::Coded { .. } => 1,
            Node::And(..) | Node::Or(..) => 2,
            Node::BForall { .. } => 3,
            Node::Block(_) | Node::NotBlock(_) => 4,
        }
    }
}

/// Recognizes `(x+y)·((x+y)+1) + 2·x = 2·z`, which holds exactly when
/// `z = ⟨x, y⟩`, and returns `[x, y, z]`.
fn pair_shape<'e>(l: &'e Expr, r: &'e Expr) -> Option<[&'e Expr; 3]> {
    let two = |e: &Expr| e.as_numeral().is_some_and(|k| k == Nat::from(2u32));
    let Expr::Add(prod, dbl) = l else { return None };
    let (Expr::Mul(s1, succ), Expr::Mul(k1, x2)) = (&**prod, &**dbl) else { return None };
    let Expr::Add(s2, one) = &**succ else { return None };
    let Expr::Add(x, y) = &**s1 else { return None };
    let Expr::Mul(k2, z) = r else { return None };
    (s1 == s2 && **one == Expr::One && two(k1) && two(k2) && x2 == x).then_some([&**x, &**y, &**z])
}

fn sorted(mut v: Vec<Slot>) -> Vec<Slot> {
    v.sort_unstable();
    v.dedup();
    v
}

fn union<'a>(parts: impl IntoIterator<Item = &'a [Slot]>) -> Vec<Slot> {
    sorted(parts.into_iter().flatten().copied().collect())
}

pub(crate) fn make_block(vars: Vec<Slot>, conjuncts: Vec<Node>) -> Block {
    let inner = union(conjuncts.iter().map(|c| c.slots()));
    let slots = inner.into_iter().filter(|s| !vars.contains(s)).collect();
    Block { vars, conjuncts, slots }
}

fn make_and(parts: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for p in parts {
        match p {
            Node::And(ps, _) => flat.extend(ps),
            Node::Const(true) => {}
            other => flat.push(other),
        }
    }
    if flat.iter().any(|p| matches!(p, Node::Const(false))) {
        return Node::Const(false);
    }
    match flat.len() {
        0 => Node::Const(true),
        1 => flat.pop().unwrap(),
        _ => {
            let slots = union(flat.iter().map(|c| c.slots()));
            Node::And(flat, slots)
        }
    }
}

fn make_or(parts: Vec<Node>) -> Node {
    let mut flat = Vec::new();
    for p in parts {
        match p {
            Node::Or(ps, _) => flat.extend(ps),
            Node::Const(false) => {}
            other => flat.push(other),
        }
    }
    if flat.iter().any(|p| matches!(p, Node::Const(true))) {
        return Node::Const(true);
    }
    match flat.len() {
        0 => Node::Const(false),
        1 => flat.pop().unwrap(),
        _ => {
            let slots = union(flat.iter().map(|c| c.slots()));
            Node::Or(flat, slots)
        }
    }
}

/// Splits a node into conjuncts, hoisting nested existential blocks.
pub(crate) fn conjuncts_of(node: Node, vars: &mut Vec<Slot>, out: &mut Vec<Node>) {
    match node {
        Node::And(ps, _) => {
            for p in ps {
                conjuncts_of(p, vars, out);
            }
        }
        Node::Block(b) => {
            vars.extend(b.vars);
            for c in b.conjuncts {
                conjuncts_of(c, vars, out);
            }
        }
        Node::Const(true) => {}
        other => out.push(other),
    }
}

fn exists_block(v: Slot, body: Node) -> Block {
    let mut vars = vec![v];
    let mut cs = Vec::new();
    conjuncts_of(body, &mut vars, &mut cs);
    make_block(vars, cs)
}

#[derive(Default)]
pub(crate) struct Compiler {
    scopes: Vec<(Var, Slot)>,
    /// Free variables of the compiled formula and their slots.
    pub free: BTreeMap<Var, Slot>,
    pub next: Slot,
}

impl Compiler {
    fn lookup(&mut self, v: Var) -> Slot {
        if let Some((_, s)) = self.scopes.iter().rev().find(|(w, _)| *w == v) {
            return *s;
        }
        if let Some(s) = self.free.get(&v) {
            return *s;
        }
        let s = self.fresh();
        self.free.insert(v, s);
        s
    }

    fn fresh(&mut self) -> Slot {
        let s = self.next;
        self.next += 1;
        s
    }

    fn term(&mut self, e: &Expr) -> Term {
        match e {
            Expr::Zero => Term::Const(Nat::from(0u32)),
            Expr::One => Term::Const(Nat::from(1u32)),
            Expr::Numeral(k) => Term::Const(k.clone()),
            Expr::Var(v) => Term::Slot(self.lookup(*v)),
            Expr::Add(a, b) => Term::Add(Box::new(self.term(a)), Box::new(self.term(b))),
            Expr::Mul(a, b) => Term::Mul(Box::new(self.term(a)), Box::new(self.term(b))),
        }
    }

    fn terms_slots(ts: &[&Term]) -> Vec<Slot> {
        let mut out = Vec::new();
        for t in ts {
            t.collect(&mut out);
        }
        sorted(out)
    }

    fn bind<T>(&mut self, v: Var, f: impl FnOnce(&mut Self, Slot) -> T) -> T {
        let s = self.fresh();
        self.scopes.push((v, s));
        let r = f(self, s);
        self.scopes.pop();
        r
    }

    /// Compiles `phi` (when `positive`) or `¬phi`.
    pub(crate) fn compile(&mut self, phi: &Formula, positive: bool) -> Node {
        match phi {
            Formula::Atom(a) => {
                let (l, r, less) = match a {
                    Atom::Less(l, r) => (l, r, true),
                    Atom::Eq(l, r) => (l, r, false),
                };
                if !less {
                    if let Some(args) = pair_shape(l, r).or_else(|| pair_shape(r, l)) {
                        let args: Vec<Term> = args.into_iter().map(|e| self.term(e)).collect();
                        let slots = Self::terms_slots(&args.iter().collect::<Vec<_>>());
                        return Node::Coded { kind: CodedKind::Pair, args, positive, slots };
                    }
                }
                let (l, r) = (self.term(l), self.term(r));
                let slots = Self::terms_slots(&[&l, &r]);
                if less {
                    Node::Less { l, r, positive, slots }
                } else {
                    Node::Eq { l, r, positive, slots }
                }
            }
            Formula::Coded(c) => {
                let kind = match c {
                    Coded::Pair { .. } => CodedKind::Pair,
                    Coded::Beta { .. } => CodedKind::Beta,
                    Coded::Elem { .. } => CodedKind::Elem,
                    Coded::Tuple { .. } => CodedKind::Tuple,
                };
                let args: Vec<Term> = c.args().into_iter().map(|e| self.term(e)).collect();
                let slots = Self::terms_slots(&args.iter().collect::<Vec<_>>());
                Node::Coded { kind, args, positive, slots }
            }
            Formula::Not(a) => self.compile(a, !positive),
            Formula::And(a, b) => {
                let (a, b) = (self.compile(a, positive), self.compile(b, positive));
                if positive {
                    make_and(vec![a, b])
                } else {
                    make_or(vec![a, b])
                }
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.compile(a, positive), self.compile(b, positive));
                if positive {
                    make_or(vec![a, b])
                } else {
                    make_and(vec![a, b])
                }
            }
            Formula::Imp(a, b) => {
                let (a, b) = (self.compile(a, !positive), self.compile(b, positive));
                if positive {
                    make_or(vec![a, b])
                } else {
                    make_and(vec![a, b])
                }
            }
            Formula::Iff(a, b) => {
                let (ap, an) = (self.compile(a, true), self.compile(a, false));
                let (bp, bn) = (self.compile(b, true), self.compile(b, false));
                if positive {
                    make_or(vec![make_and(vec![ap, bp]), make_and(vec![an, bn])])
                } else {
                    make_or(vec![make_and(vec![ap, bn]), make_and(vec![an, bp])])
                }
            }
            Formula::Exists(v, body) => self.bind(*v, |c, s| {
                let block = exists_block(s, c.compile(body, true));
                if positive {
                    Node::Block(block)
                } else {
                    Node::NotBlock(block)
                }
            }),
            Formula::Forall(v, body) => self.bind(*v, |c, s| {
                let block = exists_block(s, c.compile(body, false));
                if positive {
                    Node::NotBlock(block)
                } else {
                    Node::Block(block)
                }
            }),
            Formula::BoundedForall(v, t, body) => {
                let bound = self.term(t);
                self.bind(*v, |c, s| {
                    if positive {
                        let body = c.compile(body, true);
                        let mut inner = body.slots().to_vec();
                        inner.retain(|x| *x != s);
                        let mut bs = Vec::new();
                        bound.collect(&mut bs);
                        let slots = union([inner.as_slice(), bs.as_slice()]);
                        Node::BForall { var: s, bound, body: Box::new(body), slots }
                    } else {
                        // ∃v (v < t ∧ ¬body)
                        let lt_slots = Self::terms_slots(&[&Term::Slot(s), &bound]);
                        let lt = Node::Less { l: Term::Slot(s), r: bound, positive: true, slots: lt_slots };
                        Node::Block(exists_block(s, make_and(vec![lt, c.compile(body, false)])))
                    }
                })
            }
        }
    }
}
