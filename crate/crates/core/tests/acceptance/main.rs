//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. `ACCEPTANCE_ONLY=3,5` runs a subset.

mod corpus;
mod oracle;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use hoarith::arith_sem::{alpha, default_outputs};
use hoarith::coding::{
    beta_formula, elem_formula, pair, pair_formula, seq_elem, seq_encode, tuple_decode_formula, tuple_encode, unpair,
};
use hoarith::eval::{check_alpha_witness, eval_formula, is_delta0, Evaluator, Verdict};
use hoarith::hoare::{check_derivation_with, check_triple_bounded, generate_sp_derivation, CheckOutcome, Derivation, Discharge};
use hoarith::interp::{exec, run_function, ExecOutcome, State};
use hoarith::nonstd_order::{k_between, k_less, k_predecessor, k_successor, KElem};
use hoarith::sp::{separation_rhs, sp};
use hoarith::syntax::{parse_formula_with, Expr, Formula, Nat, Stmt, Triple, Var};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corpus::{grid, product, program, Program, CORPUS};
use oracle::{env_of, holds, SentenceGen};

const FUEL: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn nats(v: &[u64]) -> Vec<Nat> {
    v.iter().map(|k| Nat::from(*k)).collect()
}

fn small(v: &[Nat]) -> Vec<u64> {
    v.iter().map(|k| u64::try_from(k).expect("small value")).collect()
}

fn state(xs: &[Var], v: &[u64]) -> State {
    State::from_slots(xs, &nats(v))
}

fn parse_pre(prog: &Program, text: &str) -> Formula {
    let mut names = prog.names();
    let f = parse_formula_with(text, &mut names).expect("formula parses");
    assert!(f.free_vars().iter().all(|v| (v.0 as usize) < prog.vars.len()), "{text} uses an undeclared name");
    f
}

fn final_slots(s: &Stmt, xs: &[Var], v: &[u64]) -> Vec<u64> {
    match exec(s, &state(xs, v), FUEL) {
        ExecOutcome::Terminated { state, .. } => small(&state.slots(xs)),
        ExecOutcome::OutOfFuel => panic!("corpus program diverged on {v:?}"),
    }
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let prog = program("count");
    let (s, xs) = (prog.stmt(), prog.xs());
    let ys = default_outputs(&xs);
    let a = alpha(&s, &xs, &ys).expect("alpha builds").formula;
    let ev = Evaluator::new(64);
    let mut failures = Vec::new();
    let (mut refuted, mut open) = (0, 0);
    for x in 0..=50u64 {
        for y0 in [0, 5] {
            let input = nats(&[x, y0]);
            if run_function(&s, &xs, &input, FUEL).unwrap() != Some(nats(&[x, x])) {
                failures.push(format!("run_function({x},{y0})"));
            }
            if check_alpha_witness(&s, &xs, &input, &nats(&[x, x]), FUEL).unwrap().0 != Verdict::True {
                failures.push(format!("witness({x},{y0})"));
            }
            for c in [[x, x + 1], [x + 1, x], [x + 1, x + 1]] {
                let mut w = state(&xs, &[x, y0]);
                for (y, v) in ys.iter().zip(c) {
                    w.set(*y, v.into());
                }
                match ev.eval(&a, &w) {
                    Verdict::True => failures.push(format!("alpha true at ({x},{y0}) -> {c:?}")),
                    Verdict::False => refuted += 1,
                    Verdict::Unknown => open += 1,
                }
            }
        }
    }
    let took = start.elapsed();
    let pass = failures.is_empty() && took < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "102 runs and witness checks, {} failures; wrong outputs: {refuted} refuted, {open} undecided, none accepted",
            failures.len()
        ) + &first(&failures),
    )
}

/// Summarizes failures; `ACCEPTANCE_VERBOSE=1` lists all of them.
fn first(failures: &[String]) -> String {
    if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
        for f in failures {
            eprintln!("  {f}");
        }
    }
    failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for prog in CORPUS {
        let (s, xs) = (prog.stmt(), prog.xs());
        for a in grid(prog.tops) {
            let c = small(&run_function(&s, &xs, &nats(&a), FUEL).unwrap().expect("corpus programs stop"));
            for (k, want) in (prog.expect)(&a).into_iter().enumerate() {
                if want.is_some_and(|w| w != c[k]) {
                    failures.push(format!("{}: closed form differs at {a:?}", prog.name));
                }
            }
            let mut wrong = c.clone();
            wrong[0] += 1;
            let yes = check_alpha_witness(&s, &xs, &nats(&a), &nats(&c), FUEL).map(|r| r.0);
            let no = check_alpha_witness(&s, &xs, &nats(&a), &nats(&wrong), FUEL).map(|r| r.0);
            if yes != Ok(Verdict::True) || no != Ok(Verdict::False) {
                failures.push(format!("{}: {a:?} gave {yes:?} / {no:?}", prog.name));
            }
            checked += 1;
        }
    }
    let took = start.elapsed();
    let pass = failures.is_empty() && took < Duration::from_secs(120);
    outcome(pass, format!("{} programs, {checked} inputs, {} disagreements", CORPUS.len(), failures.len()) + &first(&failures))
}

/// A precondition on a corpus program together with pre-states that reach
/// every final state `S(u)`, `p(u)`, lying in the checked box.
struct SepPair {
    prog: &'static str,
    pre: &'static str,
    /// Candidate pre-state values per slot.
    pre_values: Vec<Vec<u64>>,
    post_top: u64,
}

fn upto(n: u64) -> Vec<u64> {
    (0..=n).collect()
}

fn separation_pairs() -> Vec<SepPair> {
    let pair = |prog, pre, pre_values, post_top| SepPair { prog, pre, pre_values, post_top };
    vec![
        // Dead slots are overwritten, so a single value covers them; live
        // slots are bounded by the precondition or copied to the output.
        pair("chain", "x < 3", vec![upto(2), vec![0], vec![0], vec![0]], 3),
        pair("swap", "x < 3 /\\ y < 3", vec![upto(2), upto(2), vec![0]], 3),
        pair("min", "x < 4 /\\ y < 4", vec![upto(3), upto(3), vec![0]], 4),
        pair("min", "x < 2", vec![upto(1), upto(4), vec![0]], 4),
        pair("chain", "300 < a", vec![upto(3), vec![301], vec![0], vec![0]], 3),
        pair("swap", "600 < t /\\ x < 3", vec![upto(2), upto(3), vec![601]], 3),
        pair("count", "x < 3", vec![upto(2), vec![0]], 3),
        pair("monus", "x < 3 /\\ y < 2", vec![upto(2), upto(1), vec![0]], 2),
        pair("add", "x < 2 /\\ y < 2", vec![upto(1), upto(1), vec![0], vec![0]], 2),
        pair("mult", "x < 2 /\\ y < 2", vec![upto(1), upto(1), vec![0], vec![0]], 2),
    ]
}

#[derive(Default)]
struct Tally {
    evals: usize,
    unknown: usize,
}

impl Tally {
    fn rate(&self) -> f64 {
        self.unknown as f64 / self.evals.max(1) as f64
    }
}

fn criterion_3() -> Outcome {
    const BOUNDS: [u64; 3] = [256, 512, 1024];
    let mut failures = Vec::new();
    let mut gate: [Tally; 3] = Default::default();
    let mut loops: [Tally; 3] = Default::default();
    let pairs = separation_pairs();
    for pr in &pairs {
        let prog = program(pr.prog);
        let (s, xs) = (prog.stmt(), prog.xs());
        let p = parse_pre(prog, pr.pre);
        let mut reach = HashSet::new();
        for u in product(&pr.pre_values) {
            if holds(&p, &mut env_of(&xs, &u)) {
                let out = final_slots(&s, &xs, &u);
                let mut moved = u.clone();
                for &d in prog.dead {
                    moved[d] = 7;
                }
                assert_eq!(final_slots(&s, &xs, &moved), out, "{}: slot is not dead", prog.name);
                reach.insert(out);
            }
        }
        let mut states: BTreeSet<Vec<u64>> = grid(&vec![pr.post_top; xs.len()]).into_iter().collect();
        states.extend(reach.iter().cloned());
        let lhs = sp(&p, &s, &xs).unwrap().formula;
        let rhs = separation_rhs(&p, &s, &xs).unwrap();
        for (k, bound) in BOUNDS.into_iter().enumerate() {
            let ev = Evaluator::new(bound);
            let tally = if prog.has_loop { &mut loops[k] } else { &mut gate[k] };
            for w in &states {
                let st = state(&xs, w);
                let inside = reach.contains(w);
                let (l, r) = (ev.eval(&lhs, &st), ev.eval(&rhs, &st));
                for v in [l, r] {
                    tally.evals += 1;
                    match v.as_bool() {
                        None => tally.unknown += 1,
                        Some(b) if b != inside => {
                            failures.push(format!("{} {{{}}} at {w:?}: {v} but oracle says {inside}", pr.prog, pr.pre))
                        }
                        Some(_) => {}
                    }
                }
                if l.is_definite() && r.is_definite() && l != r {
                    failures.push(format!("{} {{{}}} at {w:?}: SP {l}, characterization {r}", pr.prog, pr.pre));
                }
            }
        }
    }
    let rates: Vec<f64> = gate.iter().map(Tally::rate).collect();
    let decreasing = rates.windows(2).all(|w| w[1] < w[0] || w[0] == 0.0);
    let pass = failures.is_empty() && rates[0] < 0.10 && decreasing;
    let show = |t: &[Tally; 3]| t.iter().map(|t| format!("{:.1}%", 100.0 * t.rate())).collect::<Vec<_>>().join(" / ");
    outcome(
        pass,
        format!(
            "{} pairs, {} oracle or cross disagreements; undecided at bounds 256/512/1024: loop-free {} ({} evaluations each), with loops {}",
            pairs.len(),
            failures.len(),
            show(&gate),
            gate[0].evals,
            show(&loops),
        ) + &first(&failures),
    )
}

struct TripleCase {
    prog: &'static str,
    pre: &'static str,
    post: &'static str,
    valid: bool,
}

fn triple_cases() -> Vec<TripleCase> {
    let t = |prog, pre, post, valid| TripleCase { prog, pre, post, valid };
    vec![
        t("chain", "x < 3", "b = a * a", true),
        t("swap", "0 < x", "0 < y", true),
        t("min", "0 = 0", "m < x + 1 /\\ m < y + 1", true),
        t("min", "x < y", "m = x", true),
        t("count", "x < 2", "y = x", true),
        t("chain", "x < 3", "b = a + a", false),
        t("swap", "0 < x", "0 < x", false),
        t("min", "0 = 0", "m = x", false),
        t("count", "x < 2", "y = 0", false),
        t("monus", "x < 2 /\\ y < 2", "d = x", false),
    ]
}

/// Sweep box for the triple checks.
const TRIPLE_TOP: u64 = 3;

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let (mut tested, mut off_sweep, mut off_open) = (0, 0, 0);
    let ev = Evaluator::new(2048).with_budget(5_000_000);
    let cases = triple_cases();
    for tc in &cases {
        let prog = program(tc.prog);
        let (s, xs) = (prog.stmt(), prog.xs());
        let (p, q) = (parse_pre(prog, tc.pre), parse_pre(prog, tc.post));
        let label = format!("{{{}}} {} {{{}}}", tc.pre, tc.prog, tc.post);

        // Direct sweep: reachable finals and the counterexamples among them.
        let mut reach = HashSet::new();
        let mut bad = HashSet::new();
        for u in grid(&vec![TRIPLE_TOP; xs.len()]) {
            if holds(&p, &mut env_of(&xs, &u)) {
                let out = final_slots(&s, &xs, &u);
                if !holds(&q, &mut env_of(&xs, &out)) {
                    bad.insert(out.clone());
                }
                reach.insert(out);
            }
        }
        if bad.is_empty() != tc.valid {
            failures.push(format!("{label}: mislabelled"));
        }

        let triple = Triple { pre: p.clone(), prog: s.clone(), post: q.clone() };
        let r = check_triple_bounded(&triple, &xs, TRIPLE_TOP, FUEL, &Evaluator::new(64));
        let expected = if tc.valid { Verdict::True } else { Verdict::False };
        if r.verdict != expected {
            failures.push(format!("{label}: sweep says {}", r.verdict));
        }
        if let Some(cex) = &r.counterexample {
            let (i, f) = (small(&cex.initial.slots(&xs)), small(&cex.final_state.slots(&xs)));
            let concrete = holds(&p, &mut env_of(&xs, &i))
                && final_slots(&s, &xs, &i) == f
                && !holds(&q, &mut env_of(&xs, &f));
            if !concrete {
                failures.push(format!("{label}: counterexample {i:?} -> {f:?} does not replay"));
            }
        } else if !tc.valid {
            failures.push(format!("{label}: no counterexample"));
        }

        // `SP → q` is false exactly at reachable finals violating q. The swept
        // finals must match exactly; elsewhere in the box only definite
        // verdicts are checked, since refuting SP off the reachable set can
        // require ruling out every loop trace.
        let implication = Formula::imp(sp(&p, &s, &xs).unwrap().formula, q.clone());
        let mut any_false = false;
        for w in &reach {
            tested += 1;
            let v = ev.eval(&implication, &state(&xs, w));
            let want = Verdict::from(!bad.contains(w));
            any_false |= v == Verdict::False;
            if v != want {
                failures.push(format!("{label}: SP -> q is {v} at swept state {w:?}, expected {want}"));
            }
        }
        if any_false != (r.verdict == Verdict::False) {
            failures.push(format!("{label}: sweep and SP -> q disagree on validity"));
        }
        for w in grid(&vec![2; xs.len()]).into_iter().filter(|w| !reach.contains(w)) {
            off_sweep += 1;
            match ev.eval(&implication, &state(&xs, &w)) {
                Verdict::False => failures.push(format!("{label}: SP -> q false at unreachable {w:?}")),
                Verdict::Unknown => off_open += 1,
                Verdict::True => {}
            }
        }
    }
    let valid = cases.iter().filter(|c| c.valid).count();
    outcome(
        failures.is_empty(),
        format!(
            "{} triples ({valid} valid), {tested} swept states compared, {} mismatches; {off_sweep} other box states, {off_open} undecided",
            cases.len(),
            failures.len()
        )
            + &first(&failures),
    )
}

fn derivation_pairs() -> Vec<(&'static str, &'static str)> {
    let mut out: Vec<(&str, &str)> = separation_pairs().iter().map(|p| (p.prog, p.pre)).collect();
    out.extend(triple_cases().iter().map(|t| (t.prog, t.pre)));
    out.extend([("gcd", "a < 4 /\\ b < 4"), ("nested", "x < 2 /\\ y < 2")]);
    out.sort();
    out.dedup();
    out
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let (mut residual, mut settled) = (0, 0);
    let ev = Evaluator::new(64);
    let recheck = Evaluator::new(1024);
    let pairs = derivation_pairs();
    for &(name, pre) in &pairs {
        let prog = program(name);
        let (s, xs) = (prog.stmt(), prog.xs());
        let p = parse_pre(prog, pre);
        let d = generate_sp_derivation(&p, &s, &xs).unwrap();
        let report = check_derivation_with(&d, &ev);
        let label = format!("{{{pre}}} {name}");
        match &report.outcome {
            CheckOutcome::Invalid { reason, path } => failures.push(format!("{label}: invalid at {path}: {reason}")),
            CheckOutcome::Valid => {}
            CheckOutcome::ValidModuloObligations { obligations } => {
                for ob in obligations {
                    residual += 1;
                    if recheck.eval(&ob.formula, &State::new()) == Verdict::False {
                        failures.push(format!("{label}: obligation {} is false", ob.origin));
                    }
                }
            }
        }
        settled += report.obligations.iter().filter(|(_, h)| *h != Discharge::Evaluated(Verdict::Unknown)).count();
        let want = sp(&p, &s, &xs).unwrap().formula;
        if report.conclusion.as_ref().map(|t| &t.post) != Some(&want) {
            failures.push(format!("{label}: conclusion is not the strongest postcondition"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} derivations, none invalid; {settled} side conditions settled, {residual} residual rechecked at 1024; {} failures",
            pairs.len(),
            failures.len()
        ) + &first(&failures),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();

    let mut seen = HashSet::new();
    for x in 0..=200u64 {
        for y in 0..=200u64 {
            let z = pair(&x.into(), &y.into());
            let closed = (x + y) * (x + y + 1) / 2 + x;
            if z != Nat::from(closed) || unpair(&z) != (x.into(), y.into()) || !seen.insert(closed) {
                failures.push(format!("pair({x},{y})"));
            }
        }
    }
    // Pairs with x + y <= 200 fill an initial segment of ℕ.
    let segment = 201 * 202 / 2;
    if (0..segment).any(|z| !seen.contains(&z)) {
        failures.push("pairing image has a gap".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let len = rng.gen_range(1..=6);
        let a: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=1000)).collect();
        let c = seq_encode(&nats(&a)).unwrap();
        let (s, t) = unpair(&c);
        for (i, ai) in a.iter().enumerate() {
            let direct = &s % (BigUint::from(1u32) + (i as u64 + 1) * &t);
            if seq_elem(&c, &i.into()) != Nat::from(*ai) || direct != Nat::from(*ai) {
                failures.push(format!("sequence {a:?} at {i}"));
            }
        }
    }

    let v = |k: u32| Var(k);
    let ev = Evaluator::new(1 << 16).with_budget(2_000_000);
    let mut agree = |phi: &Formula, binding: &[(u32, u64)], truth: bool, what: &str| {
        let w = State::from_pairs(binding.iter().map(|(k, x)| (Var(*k), Nat::from(*x))));
        let got = ev.eval(phi, &w);
        if got != Verdict::from(truth) {
            failures.push(format!("{what} {binding:?}: {got}, expected {truth}"));
        }
    };
    let pf = pair_formula(v(0), v(1), v(2)).unwrap();
    let bf = beta_formula(v(0), v(1), v(2), v(3)).unwrap();
    let ef = elem_formula(v(0), v(1), v(2)).unwrap();
    let tf = tuple_decode_formula(v(0), &[v(1), v(2), v(3)]).unwrap();
    for k in 0..200 {
        let (x, y) = (rng.gen_range(0..300u64), rng.gen_range(0..300u64));
        let z = u64::try_from(pair(&x.into(), &y.into())).unwrap();
        let off = k % 2 == 1;
        agree(&pf, &[(0, x), (1, y), (2, z + u64::from(off))], !off, "pair");

        let (s, t, i) = (rng.gen_range(0..5000u64), rng.gen_range(0..40u64), rng.gen_range(0..6u64));
        let b = s % (1 + (i + 1) * t);
        agree(&bf, &[(0, s), (1, t), (2, i), (3, b + u64::from(off))], !off, "beta");

        let len = rng.gen_range(1..=3);
        let seq: Vec<u64> = (0..len).map(|_| rng.gen_range(0..4)).collect();
        let c = u64::try_from(seq_encode(&nats(&seq)).unwrap()).unwrap();
        let i = rng.gen_range(0..len);
        agree(&ef, &[(0, c), (1, i as u64), (2, seq[i] + u64::from(off))], !off, "elem");

        let parts: Vec<u64> = (0..3).map(|_| rng.gen_range(0..8)).collect();
        let z = u64::try_from(tuple_encode(&nats(&parts)).unwrap()).unwrap();
        let mut claimed = parts.clone();
        claimed[k % 3] += u64::from(off);
        agree(&tf, &[(0, z), (1, claimed[0]), (2, claimed[1]), (3, claimed[2])], !off, "tuple");
    }

    let took = start.elapsed();
    let pass = failures.is_empty() && took < Duration::from_secs(30);
    outcome(
        pass,
        format!("201² pairs, 1000 sequences, 4×200 formula samples; {} failures", failures.len()) + &first(&failures),
    )
}

/// Each mutation below breaks one rule application or one side condition.
fn first_comp_mid(d: &mut Derivation) -> Option<&mut Formula> {
    match d {
        Derivation::Comp { mid, .. } => Some(mid),
        Derivation::AssignAxiom { .. } => None,
        Derivation::Cond { then_d, else_d } => first_comp_mid(then_d).or_else(|| first_comp_mid(else_d)),
        Derivation::Iter { body_d } => first_comp_mid(body_d),
        Derivation::Conseq { inner, .. } => first_comp_mid(inner),
    }
}

fn swap_first_cond(d: &mut Derivation) -> bool {
    match d {
        Derivation::Cond { then_d, else_d } => {
            std::mem::swap(then_d, else_d);
            true
        }
        Derivation::AssignAxiom { .. } => false,
        Derivation::Comp { left, right, .. } => swap_first_cond(left) || swap_first_cond(right),
        Derivation::Iter { body_d } => swap_first_cond(body_d),
        Derivation::Conseq { inner, .. } => swap_first_cond(inner),
    }
}

/// Weakens the invariant the loop body re-establishes.
fn break_first_iter(d: &mut Derivation) -> bool {
    match d {
        Derivation::Iter { body_d } => match &mut **body_d {
            Derivation::Conseq { post, .. } => {
                *post = Formula::or(post.clone(), Formula::eq(Expr::Zero, Expr::Zero));
                true
            }
            _ => false,
        },
        Derivation::AssignAxiom { .. } => false,
        Derivation::Comp { left, right, .. } => break_first_iter(left) || break_first_iter(right),
        Derivation::Cond { then_d, else_d } => break_first_iter(then_d) || break_first_iter(else_d),
        Derivation::Conseq { inner, .. } => break_first_iter(inner),
    }
}

/// `{p} y := 0; while y < x do y := y + 1 od {inv ∧ ¬ y < x}` with `inv`
/// as the claimed invariant.
fn counting_with_invariant(p: &str, inv: &str) -> Derivation {
    let prog = program("count");
    let (x, y) = (Expr::Var(Var(0)), Var(1));
    let (p, inv) = (parse_pre(prog, p), parse_pre(prog, inv));
    let guard = Formula::less(Expr::Var(y), x);
    let init = Derivation::conseq(p, Derivation::assign(inv.clone(), y, Expr::Zero), inv.clone());
    let step = Derivation::assign(inv.clone(), y, Expr::add(Expr::Var(y), Expr::One));
    let body = Derivation::conseq(Formula::and(inv.clone(), guard), step, inv.clone());
    Derivation::comp(init, Derivation::iter(body), inv)
}

fn criterion_7() -> Outcome {
    let ev = Evaluator::new(64);
    let generated = |name: &str, pre: &str| {
        let prog = program(name);
        generate_sp_derivation(&parse_pre(prog, pre), &prog.stmt(), &prog.xs()).unwrap()
    };
    let mut bases: Vec<(String, Derivation)> = Vec::new();
    let mut mutants: Vec<(String, Derivation)> = Vec::new();

    for (name, pre) in [
        ("chain", "x < 3"),
        ("swap", "0 < x"),
        ("add", "x < 2"),
        ("mult", "y < 3"),
        ("count", "x < 4"),
        ("monus", "0 = 0"),
        ("nested", "x < 2"),
        ("swap", "x = y"),
    ] {
        let d = generated(name, pre);
        let mut m = d.clone();
        let mid = first_comp_mid(&mut m).expect("sequenced program");
        *mid = Formula::and(mid.clone(), Formula::eq(Expr::Var(Var(0)), Expr::add(Expr::Var(Var(0)), Expr::One)));
        mutants.push((format!("wrong mid in {{{pre}}} {name}"), m));
        bases.push((format!("{{{pre}}} {name}"), d));
    }
    for (name, pre) in [("min", "0 = 0"), ("min", "x < y"), ("min", "y < 5"), ("gcd", "a < 3"), ("gcd", "b = 2")] {
        let d = generated(name, pre);
        let mut m = d.clone();
        assert!(swap_first_cond(&mut m));
        mutants.push((format!("swapped branches in {{{pre}}} {name}"), m));
        bases.push((format!("{{{pre}}} {name}"), d));
    }
    for (name, pre) in [("count", "0 = 0"), ("add", "y < 2"), ("monus", "y < 1")] {
        let d = generated(name, pre);
        let mut m = d.clone();
        assert!(break_first_iter(&mut m));
        mutants.push((format!("loop body post weakened in {{{pre}}} {name}"), m));
    }
    bases.push(("hand-made invariant y < x + 1".into(), counting_with_invariant("x < 5", "y < x + 1")));
    for inv in ["y < 3", "y = 0", "y < x", "y < 2 \\/ y = 5"] {
        mutants.push((format!("non-invariant {inv}"), counting_with_invariant("x < 5", inv)));
    }

    let mut failures = Vec::new();
    for (label, d) in &bases {
        if let CheckOutcome::Invalid { reason, path } = check_derivation_with(d, &ev).outcome {
            failures.push(format!("unmutated {label} rejected at {path}: {reason}"));
        }
    }
    let (mut rejected, mut by_rule) = (0, 0);
    for (label, d) in &mutants {
        let report = check_derivation_with(d, &ev);
        match report.outcome {
            CheckOutcome::Invalid { .. } => {
                rejected += 1;
                by_rule += usize::from(report.conclusion.is_none());
            }
            _ => failures.push(format!("{label} accepted")),
        }
    }
    let pass = failures.is_empty() && mutants.len() >= 20;
    outcome(
        pass,
        format!(
            "{rejected} of {} mutants rejected ({by_rule} by rule shape, {} by a false side condition); {} unmutated bases accepted",
            mutants.len(),
            rejected - by_rule,
            bases.len(),
        ) + &first(&failures),
    )
}

fn random_kelem(rng: &mut ChaCha8Rng) -> KElem {
    if rng.gen_bool(0.4) {
        KElem::std(rng.gen_range(0..60))
    } else {
        KElem::nonstd(rng.gen_range(-12..12), rng.gen_range(1..7), rng.gen_range(-10..10))
    }
}

/// Order key compared by hand: standard elements first, then copies of ℤ by
/// their rational label (cross-multiplied), then position.
fn oracle_less(u: &KElem, v: &KElem) -> bool {
    let rat = |q: &num_rational::BigRational| -> (i128, i128) {
        (q.numer().try_into().unwrap(), q.denom().try_into().unwrap())
    };
    match (u, v) {
        (KElem::Std(m), KElem::Std(n)) => m < n,
        (KElem::Std(_), KElem::NonStd(..)) => true,
        (KElem::NonStd(..), KElem::Std(_)) => false,
        (KElem::NonStd(q, a), KElem::NonStd(r, b)) => {
            let ((qn, qd), (rn, rd)) = (rat(q), rat(r));
            qn * rd < rn * qd || (qn * rd == rn * qd && a < b)
        }
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut fail = |what: String| failures.push(what);
    for _ in 0..10_000 {
        let (u, v, w) = (random_kelem(&mut rng), random_kelem(&mut rng), random_kelem(&mut rng));
        if k_less(&u, &v) != oracle_less(&u, &v) {
            fail(format!("order of {u} and {v}"));
        }
        if k_less(&u, &u) {
            fail(format!("{u} < {u}"));
        }
        if [k_less(&u, &v), u == v, k_less(&v, &u)].iter().filter(|b| **b).count() != 1 {
            fail(format!("trichotomy for {u}, {v}"));
        }
        if k_less(&u, &v) && k_less(&v, &w) && !k_less(&u, &w) {
            fail(format!("transitivity for {u}, {v}, {w}"));
        }
        // Standard elements form an initial segment.
        if v.is_standard() && k_less(&u, &v) && !u.is_standard() {
            fail(format!("{u} below standard {v}"));
        }
        if u.is_standard() != v.is_standard() && k_less(&u, &v) != u.is_standard() {
            fail(format!("standard/nonstandard order of {u}, {v}"));
        }
        let s = k_successor(&u);
        if !k_less(&u, &s) || (k_less(&u, &v) && k_less(&v, &s)) {
            fail(format!("{v} between {u} and its successor"));
        }
        if k_predecessor(&s).as_ref() != Some(&u) {
            fail(format!("predecessor of successor of {u}"));
        }
        if !u.is_standard() {
            match k_predecessor(&u) {
                Some(p) if !p.is_standard() && k_less(&p, &u) => {}
                _ => fail(format!("{u} has no nonstandard predecessor")),
            }
        }
        if let Some(m) = k_between(&u, &v) {
            if !(k_less(&u, &m) && k_less(&m, &v)) {
                fail(format!("{m} not between {u} and {v}"));
            }
        }
    }
    if k_predecessor(&KElem::std(0)).is_some() {
        failures.push("0 has a predecessor".into());
    }
    outcome(failures.is_empty(), format!("10000 random triples, {} failures", failures.len()) + &first(&failures))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    let mut truths = 0;
    for _ in 0..500 {
        let phi = SentenceGen { rng: &mut rng, unbounded: false }.sentence(3);
        assert!(phi.is_closed() && is_delta0(&phi), "generator produced {phi}");
        let want = holds(&phi, &mut Default::default());
        truths += usize::from(want);
        let got = eval_formula(&phi, &State::new(), 8);
        if got != Verdict::from(want) {
            failures.push(format!("{phi}: {got}, expected {want}"));
        }
    }
    let mut definite = [0; 3];
    for _ in 0..500 {
        let phi = SentenceGen { rng: &mut rng, unbounded: true }.sentence(3);
        let vs: Vec<Verdict> = [8, 64, 512].iter().map(|b| Evaluator::new(*b).eval(&phi, &State::new())).collect();
        for (k, v) in vs.iter().enumerate() {
            definite[k] += usize::from(v.is_definite());
            if v.is_definite() && vs[k + 1..].iter().any(|later| later != v) {
                failures.push(format!("{phi}: {vs:?}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "500 Δ0 sentences ({truths} true), 500 sentences at bounds 8/64/512 with {}/{}/{} definite; {} failures",
            definite[0],
            definite[1],
            definite[2],
            failures.len()
        ) + &first(&failures),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "counting program", criterion_1),
        (2, "input/output formula agrees with execution", criterion_2),
        (3, "strongest postcondition characterization", criterion_3),
        (4, "bounded triple checks match SP -> q", criterion_4),
        (5, "generated derivations check", criterion_5),
        (6, "coding", criterion_6),
        (7, "mutated derivations are rejected", criterion_7),
        (8, "nonstandard order laws", criterion_8),
        (9, "evaluator soundness and monotonicity", criterion_9),
    ];
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|k| k.trim().parse().ok()).collect());
    let mut failed = 0;
    for (k, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {k} {verdict} {name}: {} [{:.1}s]", out.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!out.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
