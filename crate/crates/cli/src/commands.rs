use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use hoarith::arith_sem::{alpha as alpha_of, default_outputs};
use hoarith::coding::{seq_elem, seq_encode};
use hoarith::eval::{check_alpha_witness, Evaluator, Verdict};
use hoarith::hoare::{
    box_states, check_derivation_with, check_triple_bounded, generate_sp_derivation, obligation_to_smt2,
    CheckOutcome, Derivation, Discharge,
};
use hoarith::interp::{exec, ExecOutcome, State};
use hoarith::nonstd_order::{k_predecessor, k_successor, KElem};
use hoarith::sp::{separation_rhs, sp as sp_of};
use hoarith::syntax::{parse_formula_with, parse_program_with, program_vars, Formula, Names, Nat, SExpr, Stmt, Triple, Var};
use serde_json::{json, Value};

use crate::render::{formula_json, pretty, smt_script, state_json, var_names};
use crate::{Config, OutputFormat};

pub enum Failure {
    Usage(String),
    Error(String),
}

pub enum Status {
    Done,
    Verdict(Verdict),
}

impl Status {
    pub fn code(&self) -> u8 {
        match self {
            Status::Done | Status::Verdict(Verdict::True) => 0,
            Status::Verdict(Verdict::False) => 1,
            Status::Verdict(Verdict::Unknown) => 2,
        }
    }
}

type Outcome = Result<Status, Failure>;

fn error(msg: impl ToString) -> Failure {
    Failure::Error(msg.to_string())
}

fn unsupported(cfg: &Config, what: &str) -> Failure {
    Failure::Usage(format!("--out {:?} is not available for {what}", cfg.output_format).to_lowercase())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path, names: &mut Names) -> Result<Stmt, Failure> {
    let text = read(path)?;
    parse_program_with(&text, names).map_err(|e| error(format!("{}:{e}", path.display())))
}

/// A formula given inline, or the contents of a `.fml` file.
fn formula_arg(arg: &str, names: &mut Names) -> Result<Formula, Failure> {
    let path = Path::new(arg);
    let text = if arg.ends_with(".fml") && path.is_file() { read(path)? } else { arg.to_string() };
    parse_formula_with(&text, names).map_err(|e| error(format!("in `{}`: {e}", text.trim())))
}

fn nat(text: &str) -> Result<Nat, Failure> {
    text.trim().parse().map_err(|_| Failure::Usage(format!("`{text}` is not a natural number")))
}

/// `name=value` pairs, each argument possibly holding several separated by commas.
fn assignments(args: &[String], names: &mut Names) -> Result<Vec<(Var, Nat)>, Failure> {
    let mut out = Vec::new();
    for piece in args.iter().flat_map(|a| a.split(',')).filter(|p| !p.trim().is_empty()) {
        let (name, value) = piece
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected name=value, got `{piece}`")))?;
        out.push((names.intern(name.trim()), nat(value)?));
    }
    Ok(out)
}

/// Program variables together with the free variables of `extra`.
fn slots<'f>(s: &Stmt, extra: impl IntoIterator<Item = &'f Formula>) -> Vec<Var> {
    let mut all: BTreeSet<Var> = program_vars(s).into_iter().collect();
    for f in extra {
        all.extend(f.free_vars());
    }
    all.into_iter().collect()
}

fn print_formula(cfg: &Config, phi: &Formula, names: &Names) {
    match cfg.output_format {
        OutputFormat::Text => println!("{}", phi.display(names)),
        OutputFormat::Sexpr => println!("{}", phi.to_sexpr()),
        OutputFormat::Json => println!("{}", pretty(&formula_json(phi, names))),
        OutputFormat::Smt2 => print!("{}", smt_script(phi, names)),
    }
}

pub fn parse(cfg: &Config, file: &Path, as_formula: bool) -> Outcome {
    let mut names = Names::new();
    let is_formula = as_formula || file.extension().is_some_and(|e| e == "fml");
    if is_formula {
        let text = read(file)?;
        let phi = parse_formula_with(&text, &mut names).map_err(|e| error(format!("{}:{e}", file.display())))?;
        print_formula(cfg, &phi, &names);
        return Ok(Status::Done);
    }
    let s = load_program(file, &mut names)?;
    match cfg.output_format {
        OutputFormat::Text => println!("{}", s.display(&names)),
        OutputFormat::Sexpr => println!("{}", s.to_sexpr()),
        OutputFormat::Json => {
            let doc = json!({
                "program": s.display(&names).to_string(),
                "sexpr": s.to_sexpr(),
                "vars": var_names(&program_vars(&s), &names),
            });
            println!("{}", pretty(&doc));
        }
        OutputFormat::Smt2 => return Err(unsupported(cfg, "programs")),
    }
    Ok(Status::Done)
}

pub fn run(cfg: &Config, program: &Path, inputs: &[String]) -> Outcome {
    let mut names = Names::new();
    let s = load_program(program, &mut names)?;
    let given = assignments(inputs, &mut names)?;
    let mut xs: BTreeSet<Var> = program_vars(&s).into_iter().collect();
    xs.extend(given.iter().map(|(v, _)| *v));
    let mut xs: Vec<Var> = xs.into_iter().collect();
    xs.sort_by_key(|x| names.show(*x));
    let start = State::from_pairs(given);
    let outcome = exec(&s, &start, cfg.fuel);
    match (cfg.output_format, &outcome) {
        (OutputFormat::Text, ExecOutcome::Terminated { state, .. }) => println!("{}", state.show(&xs, &names)),
        (OutputFormat::Text, ExecOutcome::OutOfFuel) => println!("out of fuel after {} iterations", cfg.fuel),
        (OutputFormat::Json, ExecOutcome::Terminated { state, steps }) => {
            println!("{}", pretty(&json!({"terminated": true, "steps": steps, "state": state_json(state, &xs, &names)})))
        }
        (OutputFormat::Json, ExecOutcome::OutOfFuel) => {
            println!("{}", pretty(&json!({"terminated": false, "fuel": cfg.fuel})))
        }
        _ => return Err(unsupported(cfg, "run")),
    }
    Ok(match outcome {
        ExecOutcome::Terminated { .. } => Status::Done,
        ExecOutcome::OutOfFuel => Status::Verdict(Verdict::Unknown),
    })
}

/// Output variables named after the inputs, `x` giving `x_out`.
fn output_vars(xs: &[Var], names: &mut Names) -> Vec<Var> {
    let ys: Vec<Var> = xs.iter().map(|x| names.intern(&format!("{}_out", names.show(*x)))).collect();
    let distinct: BTreeSet<&Var> = ys.iter().chain(xs).collect();
    if distinct.len() == 2 * xs.len() {
        ys
    } else {
        default_outputs(xs)
    }
}

pub fn alpha(cfg: &Config, program: &Path, inputs: &[String], expect: &[String]) -> Outcome {
    let mut names = Names::new();
    let s = load_program(program, &mut names)?;
    let xs = program_vars(&s);
    if !inputs.is_empty() || !expect.is_empty() {
        let a = State::from_pairs(assignments(inputs, &mut names)?).slots(&xs);
        let c = State::from_pairs(assignments(expect, &mut names)?).slots(&xs);
        let (verdict, tree) = check_alpha_witness(&s, &xs, &a, &c, cfg.fuel).map_err(error)?;
        match cfg.output_format {
            OutputFormat::Text => {
                println!("{verdict}");
                if let Some(t) = &tree {
                    println!("{}", serde_json::to_string(t).expect("witnesses serialize"));
                }
            }
            OutputFormat::Json => println!("{}", pretty(&json!({"verdict": verdict, "witness": tree}))),
            _ => return Err(unsupported(cfg, "witness checks")),
        }
        return Ok(Status::Verdict(verdict));
    }
    let ys = output_vars(&xs, &mut names);
    let a = alpha_of(&s, &xs, &ys).map_err(error)?;
    if cfg.output_format == OutputFormat::Json {
        let mut doc = formula_json(&a.formula, &names);
        doc["inputs"] = var_names(&a.in_vars, &names);
        doc["outputs"] = var_names(&a.out_vars, &names);
        println!("{}", pretty(&doc));
    } else {
        print_formula(cfg, &a.formula, &names);
    }
    Ok(Status::Done)
}

pub fn sp(cfg: &Config, program: &Path, pre: &str) -> Outcome {
    let mut names = Names::new();
    let s = load_program(program, &mut names)?;
    let p = formula_arg(pre, &mut names)?;
    let xs = slots(&s, [&p]);
    let r = sp_of(&p, &s, &xs).map_err(error)?;
    if cfg.output_format == OutputFormat::Json {
        let mut doc = formula_json(&r.formula, &names);
        doc["vars"] = var_names(&xs, &names);
        println!("{}", pretty(&doc));
    } else {
        print_formula(cfg, &r.formula, &names);
    }
    Ok(Status::Done)
}

pub fn check_triple(cfg: &Config, program: &Path, pre: &str, post: &str) -> Outcome {
    let mut names = Names::new();
    let prog = load_program(program, &mut names)?;
    let pre = formula_arg(pre, &mut names)?;
    let post = formula_arg(post, &mut names)?;
    let xs = slots(&prog, [&pre, &post]);
    let t = Triple { pre, prog, post };
    let r = check_triple_bounded(&t, &xs, cfg.box_top, cfg.fuel, &Evaluator::new(cfg.bound));
    match cfg.output_format {
        OutputFormat::Text => {
            println!("{}", r.verdict);
            println!("{} states satisfy the precondition, {} undecided", r.relevant, r.undecided);
            if let Some(cex) = &r.counterexample {
                println!(
                    "counterexample: {} -> {}",
                    cex.initial.show(&xs, &names),
                    cex.final_state.show(&xs, &names)
                );
            }
        }
        OutputFormat::Json => {
            let cex = r.counterexample.as_ref().map(|c| {
                json!({"initial": state_json(&c.initial, &xs, &names), "final": state_json(&c.final_state, &xs, &names)})
            });
            let doc = json!({
                "verdict": r.verdict,
                "relevant": r.relevant,
                "undecided": r.undecided,
                "counterexample": cex,
                "vars": var_names(&xs, &names),
            });
            println!("{}", pretty(&doc));
        }
        _ => return Err(unsupported(cfg, "check-triple")),
    }
    Ok(Status::Verdict(r.verdict))
}

pub fn check_separation(cfg: &Config, program: &Path, pre: &str) -> Outcome {
    let mut names = Names::new();
    let s = load_program(program, &mut names)?;
    let p = formula_arg(pre, &mut names)?;
    let xs = slots(&s, [&p]);
    let lhs = sp_of(&p, &s, &xs).map_err(error)?.formula;
    let rhs = separation_rhs(&p, &s, &xs).map_err(error)?;
    let evaluator = Evaluator::new(cfg.bound);

    // Final states reached from pre-states inside the box.
    let mut reached = HashSet::new();
    for w in box_states(&xs, cfg.box_top) {
        if evaluator.eval(&p, &w) == Verdict::True {
            if let ExecOutcome::Terminated { state, .. } = exec(&s, &w, cfg.fuel) {
                reached.insert(state.slots(&xs));
            }
        }
    }

    let (mut states, mut unknown, mut disagree, mut refuted) = (0usize, 0usize, 0usize, 0usize);
    let mut first_bad: Option<State> = None;
    for w in box_states(&xs, cfg.box_top) {
        states += 1;
        let (a, b) = (evaluator.eval(&lhs, &w), evaluator.eval(&rhs, &w));
        if !a.is_definite() || !b.is_definite() {
            unknown += 1;
        }
        let split = a.is_definite() && b.is_definite() && a != b;
        let missed = reached.contains(&w.slots(&xs)) && (a == Verdict::False || b == Verdict::False);
        disagree += usize::from(split);
        refuted += usize::from(missed);
        if (split || missed) && first_bad.is_none() {
            first_bad = Some(w);
        }
    }
    let verdict = if disagree + refuted > 0 {
        Verdict::False
    } else if unknown > 0 {
        Verdict::Unknown
    } else {
        Verdict::True
    };
    match cfg.output_format {
        OutputFormat::Text => {
            println!("{verdict}");
            println!("{states} states, {disagree} disagreements, {refuted} missed reachable states, {unknown} undecided");
            if let Some(w) = &first_bad {
                println!("first failure: {}", w.show(&xs, &names));
            }
        }
        OutputFormat::Json => {
            let doc = json!({
                "verdict": verdict,
                "states": states,
                "disagreements": disagree,
                "missed": refuted,
                "undecided": unknown,
                "first_failure": first_bad.map(|w| state_json(&w, &xs, &names)),
                "vars": var_names(&xs, &names),
            });
            println!("{}", pretty(&doc));
        }
        _ => return Err(unsupported(cfg, "check-separation")),
    }
    Ok(Status::Verdict(verdict))
}

pub fn prove_sp(cfg: &Config, program: &Path, pre: &str, output: Option<&Path>) -> Outcome {
    let mut names = Names::new();
    let s = load_program(program, &mut names)?;
    let p = formula_arg(pre, &mut names)?;
    let xs = slots(&s, [&p]);
    let d = generate_sp_derivation(&p, &s, &xs).map_err(error)?;
    if !matches!(cfg.output_format, OutputFormat::Text | OutputFormat::Json) {
        return Err(unsupported(cfg, "prove-sp"));
    }
    let text = d.to_json();
    match output {
        Some(path) => fs::write(path, text + "\n").map_err(|e| error(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    Ok(Status::Done)
}

fn load_derivation(path: &Path) -> Result<Derivation, Failure> {
    Derivation::from_json(&read(path)?).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn discharge_name(d: Discharge) -> String {
    match d {
        Discharge::Tautology => "tautology".into(),
        Discharge::Evaluated(v) => v.to_string(),
    }
}

pub fn check_proof(cfg: &Config, derivation: &Path) -> Outcome {
    let d = load_derivation(derivation)?;
    let report = check_derivation_with(&d, &Evaluator::new(cfg.bound));
    let verdict = match &report.outcome {
        CheckOutcome::Valid => Verdict::True,
        CheckOutcome::Invalid { .. } => Verdict::False,
        CheckOutcome::ValidModuloObligations { .. } => Verdict::Unknown,
    };
    match cfg.output_format {
        OutputFormat::Text => {
            match &report.outcome {
                CheckOutcome::Valid => println!("valid"),
                CheckOutcome::Invalid { reason, path } => println!("invalid at {path}: {reason}"),
                CheckOutcome::ValidModuloObligations { obligations } => {
                    println!("valid modulo {} obligations", obligations.len())
                }
            }
            if let Some(t) = &report.conclusion {
                println!("{{{}}} {} {{{}}}", t.pre, t.prog, t.post);
            }
            for (ob, how) in &report.obligations {
                println!("  {} [{}] {}", ob.origin, discharge_name(*how), ob.formula);
            }
        }
        OutputFormat::Json => {
            let mut doc = serde_json::to_value(&report.outcome).expect("outcomes serialize");
            if let Value::Object(m) = &mut doc {
                m.remove("obligations");
            }
            doc["conclusion"] = match &report.conclusion {
                Some(t) => json!({"pre": t.pre.to_string(), "program": t.prog.to_string(), "post": t.post.to_string()}),
                None => Value::Null,
            };
            doc["obligations"] = report
                .obligations
                .iter()
                .map(|(ob, how)| json!({"origin": ob.origin, "formula": ob.formula.to_string(), "discharge": discharge_name(*how)}))
                .collect();
            println!("{}", pretty(&doc));
        }
        _ => return Err(unsupported(cfg, "check-proof")),
    }
    Ok(Status::Verdict(verdict))
}

pub fn export_obligations(cfg: &Config, derivation: &Path, dir: Option<&Path>, all: bool) -> Outcome {
    let d = load_derivation(derivation)?;
    let report = check_derivation_with(&d, &Evaluator::new(cfg.bound));
    if let CheckOutcome::Invalid { reason, path } = &report.outcome {
        if report.conclusion.is_none() {
            return Err(error(format!("derivation is malformed at {path}: {reason}")));
        }
    }
    let chosen = report.obligations.iter().filter(|(_, how)| all || *how != Discharge::Tautology);
    let scripts: Vec<String> = chosen.map(|(ob, _)| obligation_to_smt2(ob)).collect();
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| error(format!("{}: {e}", dir.display())))?;
            for (k, text) in scripts.iter().enumerate() {
                let path = dir.join(format!("obligation-{:03}.smt2", k + 1));
                fs::write(&path, text).map_err(|e| error(format!("{}: {e}", path.display())))?;
                println!("{}", path.display());
            }
        }
        None => println!("{}", scripts.join("\n")),
    }
    Ok(Status::Done)
}

pub fn encode_seq(cfg: &Config, values: &[String]) -> Outcome {
    let xs = values.iter().map(|v| nat(v)).collect::<Result<Vec<_>, _>>()?;
    let code = seq_encode(&xs).map_err(error)?;
    match cfg.output_format {
        OutputFormat::Text => println!("{code}"),
        OutputFormat::Json => {
            let vals: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            println!("{}", pretty(&json!({"values": vals, "code": code.to_string()})))
        }
        _ => return Err(unsupported(cfg, "encode-seq")),
    }
    Ok(Status::Done)
}

pub fn elem(cfg: &Config, code: &str, index: &str) -> Outcome {
    let (c, i) = (nat(code)?, nat(index)?);
    let v = seq_elem(&c, &i);
    match cfg.output_format {
        OutputFormat::Text => println!("{v}"),
        OutputFormat::Json => println!(
            "{}",
            pretty(&json!({"code": c.to_string(), "index": i.to_string(), "value": v.to_string()}))
        ),
        _ => return Err(unsupported(cfg, "elem")),
    }
    Ok(Status::Done)
}

fn kelem(text: &str) -> Result<KElem, Failure> {
    text.parse().map_err(|e| Failure::Usage(format!("{e}")))
}

pub fn korder_cmp(cfg: &Config, left: &str, right: &str) -> Outcome {
    let (u, v) = (kelem(left)?, kelem(right)?);
    let rel = match u.cmp(&v) {
        std::cmp::Ordering::Less => "<",
        std::cmp::Ordering::Equal => "=",
        std::cmp::Ordering::Greater => ">",
    };
    match cfg.output_format {
        OutputFormat::Text => println!("{u} {rel} {v}"),
        OutputFormat::Json => println!("{}", pretty(&json!({"left": u, "right": v, "relation": rel}))),
        _ => return Err(unsupported(cfg, "korder")),
    }
    Ok(Status::Done)
}

pub fn korder_step(cfg: &Config, elem: &str, forward: bool) -> Outcome {
    let u = kelem(elem)?;
    let next = if forward { Some(k_successor(&u)) } else { k_predecessor(&u) };
    let Some(next) = next else {
        return Err(error(format!("{u} has no predecessor")));
    };
    match cfg.output_format {
        OutputFormat::Text => println!("{next}"),
        OutputFormat::Json => println!("{}", pretty(&json!({"input": u, "result": next}))),
        _ => return Err(unsupported(cfg, "korder")),
    }
    Ok(Status::Done)
}
