use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oag_cli::expr::{parse, SetExpr};
use oag_cli::oracle::{oracle, OracleOp};
use oag_cli::run::{load_set, periods, read_certificate, replay_decomposition, replay_witness, run, Options, Outcome, RunError};
use serde_json::json;

#[derive(Parser)]
#[command(name = "oag", version, about = "Exact calculus for discrete sets in lexicographic rational groups")]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Plain text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Worker threads for the successor oracle.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an expression and print its normal form.
    Parse { expr: String },
    /// Evaluate an expression.
    Eval { expr: String },
    /// Difference set.
    Diff {
        #[arg(long)]
        set: PathBuf,
    },
    /// Iterated difference set.
    Iterdiff {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Chain forms.
    Chains {
        #[arg(long)]
        set: PathBuf,
    },
    /// Cofinal Archimedean classes.
    Cstar {
        #[arg(long)]
        set: PathBuf,
    },
    /// Eventual period of each chain word.
    Period {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Elements whose difference word starts with the given letters.
    Psigma {
        #[arg(long)]
        set: PathBuf,
        /// Comma-separated elements, e.g. "(0,1),(0,2)".
        #[arg(long)]
        sigma: String,
    },
    /// Pseudo-arithmetic decomposition; `--replay` rechecks a saved report.
    Decompose {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Split into pieces with a uniform difference pattern.
    Uniformize {
        #[arg(long)]
        set: PathBuf,
    },
    /// Split by Archimedean class of the gaps.
    Archsplit {
        #[arg(long)]
        set: PathBuf,
    },
    /// Defining formula over an integer-like group.
    Defing {
        #[arg(long)]
        set: PathBuf,
    },
    /// Build and verify an inp-pattern; `--replay` rechecks a saved instance.
    WitnessInp {
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        columns: usize,
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Brute-force recheck of a symbolic result.
    Oracle {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum)]
        op: OracleOp,
        #[arg(long, default_value_t = 2000)]
        window: usize,
    },
}

fn load(p: &PathBuf) -> SetExpr {
    SetExpr::Load(p.display().to_string())
}

fn dispatch(cli: &Cli) -> Result<Outcome, RunError> {
    let opts = Options { seed: cli.seed, jobs: cli.jobs };
    let expr = match &cli.cmd {
        Cmd::Parse { expr } => {
            let e = parse(expr)?;
            return Ok(Outcome { json: json!({ "expr": e.to_string() }), verified: true });
        }
        Cmd::Eval { expr } => parse(expr)?,
        Cmd::Diff { set } => SetExpr::Diff(Box::new(load(set))),
        Cmd::Iterdiff { set, n } => SetExpr::Iter(Box::new(load(set)), *n),
        Cmd::Chains { set } => SetExpr::Chains(Box::new(load(set))),
        Cmd::Cstar { set } => SetExpr::Cstar(Box::new(load(set))),
        Cmd::Period { set, bound } => return Ok(periods(&load_set(set)?, *bound)),
        Cmd::Psigma { set, sigma } => {
            let e = parse(&format!("psigma(points(), [{sigma}])"))?;
            let SetExpr::Psigma(_, s) = e else { unreachable!() };
            SetExpr::Psigma(Box::new(load(set)), s)
        }
        Cmd::Decompose { set, replay: Some(r) } => return replay_decomposition(&load_set(set)?, &read_certificate(r)?),
        Cmd::Decompose { set, replay: None } => SetExpr::Decompose(Box::new(load(set))),
        Cmd::Uniformize { set } => SetExpr::Uniformize(Box::new(load(set))),
        Cmd::Archsplit { set } => SetExpr::Archsplit(Box::new(load(set))),
        Cmd::Defing { set } => SetExpr::Defing(Box::new(load(set))),
        Cmd::WitnessInp { replay: Some(r), .. } => return replay_witness(&read_certificate(r)?),
        Cmd::WitnessInp { levels, columns, dense, replay: None } => SetExpr::Witness { levels: *levels, columns: *columns, dense: *dense },
        Cmd::Oracle { set, op, window } => return oracle(&load_set(set)?, *op, *window, cli.seed, cli.jobs),
    };
    run(&expr, &opts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            let body = if cli.text {
                oag_cli::text::render(&out.json)
            } else {
                serde_json::to_string_pretty(&out.json).unwrap() + "\n"
            };
            let _ = std::io::stdout().write_all(body.as_bytes());
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
