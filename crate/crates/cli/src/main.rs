//! `hoarith`: run, arithmetize and verify while-programs from the shell.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit code for malformed command lines.
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "hoarith", version, about = "Strongest postconditions and Hoare derivations for while-programs over ℕ")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Sexpr,
    Json,
    Smt2,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Loop-iteration budget for program execution.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub fuel: u64,
    /// Search bound for unbounded quantifiers in the evaluator.
    #[arg(long, global = true, env = "HOARITH_DEFAULT_BOUND", default_value_t = 64)]
    pub bound: u64,
    /// Largest value per variable when sweeping states.
    #[arg(long = "box", global = true, default_value_t = 16)]
    pub box_top: u64,
    #[arg(long = "out", alias = "format", global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output_format: OutputFormat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program (`.whl`) or formula (`.fml`) and print it back.
    Parse {
        file: PathBuf,
        /// Read the file as a formula regardless of its extension.
        #[arg(long)]
        formula: bool,
    },
    /// Execute a program from the given inputs; unlisted variables start at 0.
    Run {
        program: PathBuf,
        /// `name=value`, repeatable or comma-separated.
        #[arg(long = "input", short)]
        inputs: Vec<String>,
    },
    /// Print the formula defining the program's input/output function.
    Alpha {
        program: PathBuf,
        /// Check the formula at these inputs against `--expect`, building witnesses.
        #[arg(long = "input", short)]
        inputs: Vec<String>,
        #[arg(long = "expect")]
        expect: Vec<String>,
    },
    /// Print the strongest-postcondition formula of `--pre` under the program.
    Sp {
        program: PathBuf,
        #[arg(long)]
        pre: String,
    },
    /// Sweep every state in the box for counterexamples to `{pre} S {post}`.
    CheckTriple {
        program: PathBuf,
        #[arg(long)]
        pre: String,
        #[arg(long)]
        post: String,
    },
    /// Compare the strongest postcondition with its characterization through
    /// the input/output formula on every state in the box.
    CheckSeparation {
        program: PathBuf,
        #[arg(long)]
        pre: String,
    },
    /// Build a derivation of `{pre} S {SP(pre, S)}` as `.deriv.json`.
    ProveSp {
        program: PathBuf,
        #[arg(long)]
        pre: String,
        /// Write the derivation here instead of standard output.
        #[arg(long = "output", short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check a `.deriv.json` derivation and settle its side conditions.
    CheckProof { derivation: PathBuf },
    /// Write each side condition of a derivation as an SMT-LIB script.
    ExportObligations {
        derivation: PathBuf,
        /// Directory for `obligation-NNN.smt2` files; standard output otherwise.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Include side conditions already settled propositionally.
        #[arg(long)]
        all: bool,
    },
    /// Code a finite sequence of naturals as one natural.
    EncodeSeq { values: Vec<String> },
    /// Read entry `index` of a coded sequence.
    Elem { code: String, index: String },
    /// Work with elements of the order type ℕ + ℚ×ℤ, written `n` or `(p/q, a)`.
    Korder {
        #[command(subcommand)]
        op: KorderOp,
    },
}

#[derive(Subcommand, Debug)]
enum KorderOp {
    /// Print `<`, `=` or `>`.
    Cmp {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    Succ {
        #[arg(allow_hyphen_values = true)]
        elem: String,
    },
    Pred {
        #[arg(allow_hyphen_values = true)]
        elem: String,
    },
}

fn main() -> ExitCode {
    // Exit quietly when the reader of standard output goes away.
    std::panic::set_hook(Box::new(|info| {
        let msg = info.payload().downcast_ref::<String>().map(String::as_str).unwrap_or("");
        if !msg.contains("Broken pipe") {
            eprintln!("{info}");
        }
    }));
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = cli.config;
    let result = match cli.command {
        Command::Parse { file, formula } => commands::parse(&cfg, &file, formula),
        Command::Run { program, inputs } => commands::run(&cfg, &program, &inputs),
        Command::Alpha { program, inputs, expect } => commands::alpha(&cfg, &program, &inputs, &expect),
        Command::Sp { program, pre } => commands::sp(&cfg, &program, &pre),
        Command::CheckTriple { program, pre, post } => commands::check_triple(&cfg, &program, &pre, &post),
        Command::CheckSeparation { program, pre } => commands::check_separation(&cfg, &program, &pre),
        Command::ProveSp { program, pre, output } => commands::prove_sp(&cfg, &program, &pre, output.as_deref()),
        Command::CheckProof { derivation } => commands::check_proof(&cfg, &derivation),
        Command::ExportObligations { derivation, dir, all } => {
            commands::export_obligations(&cfg, &derivation, dir.as_deref(), all)
        }
        Command::EncodeSeq { values } => commands::encode_seq(&cfg, &values),
        Command::Elem { code, index } => commands::elem(&cfg, &code, &index),
        Command::Korder { op } => match op {
            KorderOp::Cmp { left, right } => commands::korder_cmp(&cfg, &left, &right),
            KorderOp::Succ { elem } => commands::korder_step(&cfg, &elem, true),
            KorderOp::Pred { elem } => commands::korder_step(&cfg, &elem, false),
        },
    };
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("hoarith: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(commands::Failure::Error(msg)) => {
            eprintln!("hoarith: {msg}");
            ExitCode::from(1)
        }
    }
}
