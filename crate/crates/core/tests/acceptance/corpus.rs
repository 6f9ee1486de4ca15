//! Programs shared by the acceptance criteria, each with a closed-form
//! description of the function it computes.

use hoarith::syntax::{parse_program_with, Names, Stmt, Var};

pub struct Program {
    pub name: &'static str,
    pub text: &'static str,
    /// Slot order; `vars[k]` is `Var(k)`.
    pub vars: &'static [&'static str],
    /// Inclusive per-slot maxima of the input box.
    pub tops: &'static [u64],
    /// Slots overwritten before they are read.
    pub dead: &'static [usize],
    pub has_loop: bool,
    /// Expected final value per slot; `None` where the value is incidental.
    pub expect: fn(&[u64]) -> Vec<Option<u64>>,
}

impl Program {
    pub fn stmt(&self) -> Stmt {
        let mut names = self.names();
        parse_program_with(self.text, &mut names).expect("corpus programs parse")
    }

    pub fn names(&self) -> Names {
        Names::declared(self.vars)
    }

    pub fn xs(&self) -> Vec<Var> {
        (0..self.vars.len() as u32).map(Var).collect()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub const CORPUS: &[Program] = &[
    Program {
        name: "chain",
        text: "a := x + 1; b := a * a; c := b + x",
        vars: &["x", "a", "b", "c"],
        tops: &[12, 2, 2, 2],
        dead: &[1, 2, 3],
        has_loop: false,
        expect: |v| {
            let a = v[0] + 1;
            vec![Some(v[0]), Some(a), Some(a * a), Some(a * a + v[0])]
        },
    },
    Program {
        name: "swap",
        text: "t := x; x := y; y := t",
        vars: &["x", "y", "t"],
        tops: &[12, 12, 2],
        dead: &[2],
        has_loop: false,
        expect: |v| vec![Some(v[1]), Some(v[0]), Some(v[0])],
    },
    Program {
        name: "min",
        text: "if x < y then m := x else m := y fi",
        vars: &["x", "y", "m"],
        tops: &[12, 12, 2],
        dead: &[2],
        has_loop: false,
        expect: |v| vec![Some(v[0]), Some(v[1]), Some(v[0].min(v[1]))],
    },
    Program {
        name: "add",
        text: "z := x; i := 0; while i < y do z := z + 1; i := i + 1 od",
        vars: &["x", "y", "z", "i"],
        tops: &[12, 12, 1, 1],
        dead: &[2, 3],
        has_loop: true,
        expect: |v| vec![Some(v[0]), Some(v[1]), Some(v[0] + v[1]), Some(v[1])],
    },
    Program {
        name: "mult",
        text: "z := 0; i := 0; while i < y do z := z + x; i := i + 1 od",
        vars: &["x", "y", "z", "i"],
        tops: &[12, 12, 1, 1],
        dead: &[2, 3],
        has_loop: true,
        expect: |v| vec![Some(v[0]), Some(v[1]), Some(v[0] * v[1]), Some(v[1])],
    },
    Program {
        name: "monus",
        text: "d := 0; while d + y < x do d := d + 1 od",
        vars: &["x", "y", "d"],
        tops: &[12, 12, 1],
        dead: &[2],
        has_loop: true,
        expect: |v| vec![Some(v[0]), Some(v[1]), Some(v[0].saturating_sub(v[1]))],
    },
    Program {
        name: "gcd",
        text: "while 0 < a /\\ 0 < b /\\ ~(a = b) do \
                 if b < a then d := 0; while b + d < a do d := d + 1 od; a := d \
                 else d := 0; while a + d < b do d := d + 1 od; b := d fi \
               od",
        vars: &["a", "b", "d"],
        tops: &[12, 12, 1],
        dead: &[],
        has_loop: true,
        expect: |v| {
            let (a, b) = (v[0], v[1]);
            if a == 0 || b == 0 || a == b {
                vec![Some(a), Some(b), Some(v[2])]
            } else {
                let g = gcd(a, b);
                vec![Some(g), Some(g), Some(g)]
            }
        },
    },
    Program {
        name: "nested",
        text: "z := 0; i := 0; while i < x do j := 0; while j < y do z := z + 1; j := j + 1 od; i := i + 1 od",
        vars: &["x", "y", "z", "i", "j"],
        tops: &[12, 12, 0, 0, 1],
        dead: &[2, 3],
        has_loop: true,
        expect: |v| {
            let j = if v[0] > 0 { v[1] } else { v[4] };
            vec![Some(v[0]), Some(v[1]), Some(v[0] * v[1]), Some(v[0]), Some(j)]
        },
    },
    Program {
        name: "count",
        text: "y := 0; while y < x do y := y + 1 od",
        vars: &["x", "y"],
        tops: &[12, 12],
        dead: &[1],
        has_loop: true,
        expect: |v| vec![Some(v[0]), Some(v[0])],
    },
];

pub fn program(name: &str) -> &'static Program {
    CORPUS.iter().find(|p| p.name == name).expect("known corpus program")
}

/// Every point of the box `0..=tops[k]`, in lexicographic order.
pub fn grid(tops: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &top in tops {
        out = out
            .into_iter()
            .flat_map(|p| (0..=top).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

/// Points of the product of explicit per-slot value lists.
pub fn product(values: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for vs in values {
        out = out
            .into_iter()
            .flat_map(|p| vs.iter().map(move |v| [p.clone(), vec![*v]].concat()))
            .collect();
    }
    out
}
