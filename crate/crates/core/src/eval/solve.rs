//! Search over the compiled IR.
//!
//! An existential block is solved by, in order: evaluating conjuncts that are
//! already closed, splitting independent components, reading off variables
//! that a conjunct determines functionally, splitting on disjunctions,
//! exhaustive enumeration below a derived upper bound, and finally a capped
//! search `0..=cap` that can only ever report `True`.

use num_traits::{One, Zero};

use super::compile::{Block, CodedKind, Node, Slot, Term};
use super::Verdict;
use crate::coding::{beta, pair, seq_elem, tuple_decode, tuple_encode, unpair};
use crate::syntax::Nat;

pub(crate) struct Solver {
    env: Vec<Option<Nat>>,
    cap: Nat,
    ticks: u64,
    budget: u64,
    pub exhausted: bool,
    pub used_cap: bool,
}

enum Det {
    Unsatisfiable,
    Values(Vec<(Slot, Nat)>),
}

enum Bound {
    Empty,
    Upto(Nat),
}

#[derive(Clone)]
enum Arg {
    Known(Nat),
    Hole(Slot),
    Other,
}

impl Solver {
    pub(crate) fn new(env: Vec<Option<Nat>>, cap: u64, budget: u64) -> Self {
        Solver { env, cap: Nat::from(cap), ticks: 0, budget, exhausted: false, used_cap: false }
    }

    fn tick(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks > self.budget {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn val(&self, t: &Term) -> Option<Nat> {
        match t {
            Term::Const(k) => Some(k.clone()),
            Term::Slot(s) => self.env[*s].clone(),
            Term::Add(a, b) => Some(self.val(a)? + self.val(b)?),
            Term::Mul(a, b) => Some(self.val(a)? * self.val(b)?),
        }
    }

    fn ready(&self, n: &Node) -> bool {
        n.slots().iter().all(|s| self.env[*s].is_some())
    }

    fn unassigned(&self, s: Slot) -> bool {
        self.env[s].is_none()
    }

    /// `t ≥ v` for every value of `v`, and `t` strictly increasing in `v`
    /// once the other slots are fixed.
    fn dominates(&self, t: &Term, v: Slot) -> bool {
        match t {
            Term::Slot(s) => *s == v,
            Term::Const(_) => false,
            Term::Add(a, b) => self.dominates(a, v) || self.dominates(b, v),
            Term::Mul(a, b) => {
                let scaled = |x: &Term, k: &Term| {
                    self.dominates(x, v)
                        && !k.mentions(v)
                        && self.val(k).is_some_and(|k| !k.is_zero())
                };
                (self.dominates(a, v) && self.dominates(b, v)) || scaled(a, b) || scaled(b, a)
            }
        }
    }

    pub(crate) fn eval(&mut self, node: &Node) -> Verdict {
        if self.tick() {
            return Verdict::Unknown;
        }
        match node {
            Node::Const(b) => Verdict::from(*b),
            Node::Less { l, r, positive, .. } => {
                Verdict::from((self.val(l).unwrap() < self.val(r).unwrap()) == *positive)
            }
            Node::Eq { l, r, positive, .. } => {
                Verdict::from((self.val(l).unwrap() == self.val(r).unwrap()) == *positive)
            }
            Node::Coded { kind, args, positive, .. } => {
                let vals: Vec<Nat> = args.iter().map(|a| self.val(a).unwrap()).collect();
                Verdict::from(coded_holds(kind, &vals) == *positive)
            }
            Node::And(ps, _) => {
                let mut ps: Vec<&Node> = ps.iter().collect();
                ps.sort_by_key(|p| p.cost());
                let mut acc = Verdict::True;
                for p in ps {
                    acc = acc.and(self.eval(p));
                    if acc == Verdict::False {
                        break;
                    }
                }
                acc
            }
            Node::Or(ps, _) => {
                let mut ps: Vec<&Node> = ps.iter().collect();
                ps.sort_by_key(|p| p.cost());
                let mut acc = Verdict::False;
                for p in ps {
                    acc = acc.or(self.eval(p));
                    if acc == Verdict::True {
                        break;
                    }
                }
                acc
            }
            Node::Block(b) => self.solve_block(b),
            Node::NotBlock(b) => self.solve_block(b).not(),
            Node::BForall { var, bound, body, .. } => {
                let n = self.val(bound).unwrap();
                let mut k = Nat::zero();
                let mut acc = Verdict::True;
                while k < n {
                    self.env[*var] = Some(k.clone());
                    acc = acc.and(self.eval(body));
                    if acc == Verdict::False || self.exhausted {
                        break;
                    }
                    k += 1u32;
                }
                self.env[*var] = None;
                if self.exhausted && acc != Verdict::False {
                    Verdict::Unknown
                } else {
                    acc
                }
            }
        }
    }

    fn solve_block(&mut self, b: &Block) -> Verdict {
        self.solve(&b.vars, b.conjuncts.iter().collect())
    }

    fn solve(&mut self, vars: &[Slot], mut pending: Vec<&Node>) -> Verdict {
        if self.tick() {
            return Verdict::Unknown;
        }
        pending.sort_by_key(|p| p.cost());
        let mut unknown = false;
        let mut rest = Vec::new();
        let mut deferred = Vec::new();
        for c in pending {
            if !self.ready(c) {
                rest.push(c);
            } else if c.cost() >= 3 {
                // Closed but expensive: independent of the search below.
                deferred.push(c);
            } else {
                match self.eval(c) {
                    Verdict::False => return Verdict::False,
                    Verdict::Unknown => unknown = true,
                    Verdict::True => {}
                }
            }
        }
        let result = if rest.is_empty() {
            Verdict::True
        } else {
            let live: Vec<Slot> = vars
                .iter()
                .copied()
                .filter(|v| self.unassigned(*v) && rest.iter().any(|c| c.mentions(*v)))
                .collect();
            debug_assert!(!live.is_empty(), "open conjunct without a block variable");
            self.solve_live(&live, &rest)
        };
        if result == Verdict::False {
            return Verdict::False;
        }
        for c in deferred {
            match self.eval(c) {
                Verdict::False => return Verdict::False,
                Verdict::Unknown => unknown = true,
                Verdict::True => {}
            }
        }
        if unknown {
            Verdict::Unknown
        } else {
            result
        }
    }

    fn solve_live(&mut self, live: &[Slot], rest: &[&Node]) -> Verdict {
        if live.len() > 1 {
            let comps = self.components(live, rest);
            if comps.len() > 1 {
                let mut acc = Verdict::True;
                for (vs, cs) in comps {
                    acc = acc.and(self.solve(&vs, cs));
                    if acc == Verdict::False {
                        break;
                    }
                }
                return acc;
            }
        }

        for c in rest {
            match self.determine(c) {
                Some(Det::Unsatisfiable) => return Verdict::False,
                Some(Det::Values(vals)) => {
                    for (s, v) in &vals {
                        self.env[*s] = Some(v.clone());
                    }
                    let r = self.solve(live, rest.to_vec());
                    for (s, _) in &vals {
                        self.env[*s] = None;
                    }
                    return r;
                }
                None => {}
            }
        }

        if let Some(k) = rest.iter().position(|c| matches!(c, Node::Or(..))) {
            let Node::Or(ds, _) = rest[k] else { unreachable!() };
            let others: Vec<&Node> =
                rest.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| *c).collect();
            let mut acc = Verdict::False;
            for d in ds {
                let mut vars = live.to_vec();
                let mut cs = others.clone();
                spread(d, &mut vars, &mut cs);
                acc = acc.or(self.solve(&vars, cs));
                if acc == Verdict::True || self.exhausted {
                    break;
                }
            }
            return if self.exhausted && acc != Verdict::True { Verdict::Unknown } else { acc };
        }

        let mut best: Option<(Slot, Nat)> = None;
        for &v in live {
            for c in rest {
                match self.upper_bound(c, v) {
                    Some(Bound::Empty) => return Verdict::False,
                    Some(Bound::Upto(n)) => {
                        if best.as_ref().is_none_or(|(_, b)| n < *b) {
                            best = Some((v, n));
                        }
                    }
                    None => {}
                }
            }
        }
        if let Some((v, ub)) = best {
            return self.enumerate(v, &ub, live, rest, true);
        }

        self.used_cap = true;
        let cap = self.cap.clone();
        self.enumerate(live[0], &cap, live, rest, false)
    }

    /// Disjunction over `v ∈ 0..=top`; `exact` when `top` bounds every solution.
    fn enumerate(&mut self, v: Slot, top: &Nat, live: &[Slot], rest: &[&Node], exact: bool) -> Verdict {
        let mut acc = Verdict::False;
        let mut k = Nat::zero();
        while k <= *top {
            if self.tick() {
                break;
            }
            self.env[v] = Some(k.clone());
            acc = acc.or(self.solve(live, rest.to_vec()));
            if acc == Verdict::True {
                break;
            }
            k += 1u32;
        }
        self.env[v] = None;
        match acc {
            Verdict::True => Verdict::True,
            _ if self.exhausted || !exact => Verdict::Unknown,
            other => other,
        }
    }

    /// Groups open conjuncts by shared unassigned block variables.
    fn components<'a>(&self, live: &[Slot], rest: &[&'a Node]) -> Vec<(Vec<Slot>, Vec<&'a Node>)> {
        let mut parent: Vec<usize> = (0..live.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let index = |s: Slot| live.iter().position(|v| *v == s);
        for c in rest {
            let mut first = None;
            for s in c.slots() {
                if let Some(i) = index(*s) {
                    match first {
                        None => first = Some(i),
                        Some(f) => {
                            let (a, b) = (find(&mut parent, f), find(&mut parent, i));
                            parent[a] = b;
                        }
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Vec<Slot>, Vec<&'a Node>)> = Vec::new();
        for (i, v) in live.iter().enumerate() {
            let r = find(&mut parent, i);
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => g.1.push(*v),
                None => groups.push((r, vec![*v], Vec::new())),
            }
        }
        for c in rest {
            let i = c.slots().iter().find_map(|s| index(*s)).expect("open conjunct");
            let r = find(&mut parent, i);
            groups.iter_mut().find(|g| g.0 == r).unwrap().2.push(c);
        }
        groups.into_iter().map(|(_, vs, cs)| (vs, cs)).collect()
    }

    fn arg(&self, t: &Term) -> Arg {
        if let Term::Slot(s) = t {
            if self.unassigned(*s) {
                return Arg::Hole(*s);
            }
        }
        match self.val(t) {
            Some(n) => Arg::Known(n),
            None => Arg::Other,
        }
    }

    /// Matches arguments against the values they are forced to take.
    fn bind_holes(&self, wanted: Vec<(Arg, Nat)>) -> Option<Det> {
        let mut out: Vec<(Slot, Nat)> = Vec::new();
        for (a, n) in wanted {
            match a {
                Arg::Known(k) if k != n => return Some(Det::Unsatisfiable),
                Arg::Known(_) => {}
                Arg::Hole(s) => match out.iter().find(|(t, _)| *t == s) {
                    Some((_, m)) if *m != n => return Some(Det::Unsatisfiable),
                    Some(_) => {}
                    None => out.push((s, n)),
                },
                Arg::Other => return None,
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(Det::Values(out))
        }
    }

    fn determine(&mut self, c: &Node) -> Option<Det> {
        match c {
            Node::Eq { l, r, positive: true, slots } => {
                let mut open = slots.iter().copied().filter(|s| self.unassigned(*s));
                let v = open.next()?;
                if open.next().is_some() {
                    return None;
                }
                let (f, other) = match (l.mentions(v), r.mentions(v)) {
                    (true, false) => (l, r),
                    (false, true) => (r, l),
                    _ => return None,
                };
                if !self.dominates(f, v) {
                    return None;
                }
                let target = self.val(other)?;
                Some(self.invert(f, v, &target))
            }
            Node::Coded { kind, args, positive: true, .. } => {
                let a: Vec<Arg> = args.iter().map(|t| self.arg(t)).collect();
                match kind {
                    CodedKind::Pair => match (&a[0], &a[1], &a[2]) {
                        (_, _, Arg::Known(z)) => {
                            let (x, y) = unpair(z);
                            self.bind_holes(vec![(a[0].clone(), x), (a[1].clone(), y)])
                        }
                        (Arg::Known(x), Arg::Known(y), Arg::Hole(_)) => {
                            self.bind_holes(vec![(a[2].clone(), pair(x, y))])
                        }
                        _ => None,
                    },
                    CodedKind::Beta => match (&a[0], &a[1], &a[2], &a[3]) {
                        (Arg::Known(s), Arg::Known(t), Arg::Known(i), Arg::Hole(_)) => {
                            self.bind_holes(vec![(a[3].clone(), beta(s, t, i))])
                        }
                        _ => None,
                    },
                    CodedKind::Elem => match (&a[0], &a[1], &a[2]) {
                        (Arg::Known(c), Arg::Known(i), Arg::Hole(_)) => {
                            self.bind_holes(vec![(a[2].clone(), seq_elem(c, i))])
                        }
                        _ => None,
                    },
                    CodedKind::Tuple => {
                        let parts = &a[1..];
                        if let Arg::Known(z) = &a[0] {
                            let vals = tuple_decode(z, parts.len()).ok()?;
                            self.bind_holes(parts.iter().cloned().zip(vals).collect())
                        } else if let Arg::Hole(_) = a[0] {
                            let known: Option<Vec<Nat>> = parts
                                .iter()
                                .map(|p| if let Arg::Known(k) = p { Some(k.clone()) } else { None })
                                .collect();
                            let code = tuple_encode(&known?).ok()?;
                            self.bind_holes(vec![(a[0].clone(), code)])
                        } else {
                            None
                        }
                    }
                }
            }
            _ => None,
        }
    }

    /// Solves `f(v) = target` for `f` strictly increasing with `f(v) ≥ v`.
    fn invert(&mut self, f: &Term, v: Slot, target: &Nat) -> Det {
        let at = |s: &mut Self, k: &Nat| {
            s.env[v] = Some(k.clone());
            s.val(f).unwrap()
        };
        let (mut lo, mut hi) = (Nat::zero(), target.clone());
        while lo < hi {
            let mid: Nat = (&lo + &hi) >> 1;
            if at(self, &mid) < *target {
                lo = mid + Nat::one();
            } else {
                hi = mid;
            }
        }
        let hit = at(self, &lo) == *target;
        self.env[v] = None;
        if hit {
            Det::Values(vec![(v, lo)])
        } else {
            Det::Unsatisfiable
        }
    }

    fn upper_bound(&self, c: &Node, v: Slot) -> Option<Bound> {
        if !c.mentions(v) {
            return None;
        }
        let below = |n: Nat| if n.is_zero() { Bound::Empty } else { Bound::Upto(n - Nat::one()) };
        match c {
            Node::Less { l, r, positive: true, .. } if self.dominates(l, v) => self.val(r).map(below),
            Node::Less { l, r, positive: false, .. } if self.dominates(r, v) => {
                self.val(l).map(Bound::Upto)
            }
            Node::Eq { l, r, positive: true, .. } => {
                if self.dominates(l, v) {
                    self.val(r).map(Bound::Upto)
                } else if self.dominates(r, v) {
                    self.val(l).map(Bound::Upto)
                } else {
                    None
                }
            }
            Node::Coded { kind, args, positive: true, .. } => {
                // Every component of a code is at most the code.
                let (code, parts): (&Term, Vec<&Term>) = match kind {
                    CodedKind::Pair => (&args[2], vec![&args[0], &args[1]]),
                    CodedKind::Tuple => (&args[0], args[1..].iter().collect()),
                    CodedKind::Elem => (&args[0], vec![&args[2]]),
                    CodedKind::Beta => (&args[0], vec![&args[3]]),
                };
                if parts.iter().any(|p| self.dominates(p, v)) {
                    self.val(code).map(Bound::Upto)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// Adds the conjuncts of `node` to `out`, hoisting nested blocks.
fn spread<'a>(node: &'a Node, vars: &mut Vec<Slot>, out: &mut Vec<&'a Node>) {
    match node {
        Node::And(ps, _) => {
            for p in ps {
                spread(p, vars, out);
            }
        }
        Node::Block(b) => {
            vars.extend(b.vars.iter().copied());
            for c in &b.conjuncts {
                spread(c, vars, out);
            }
        }
        Node::Const(true) => {}
        other => out.push(other),
    }
}

pub(crate) fn coded_holds(kind: &CodedKind, v: &[Nat]) -> bool {
    match kind {
        CodedKind::Pair => pair(&v[0], &v[1]) == v[2],
        CodedKind::Beta => beta(&v[0], &v[1], &v[2]) == v[3],
        CodedKind::Elem => seq_elem(&v[0], &v[1]) == v[2],
        CodedKind::Tuple => tuple_encode(&v[1..]).is_ok_and(|z| z == v[0]),
    }
}
