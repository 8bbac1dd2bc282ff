use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use sumok2set_cli::commands::{self, TranslateFlags};
use sumok2set_cli::config::{Config, ProverDef};
use sumok2set_core::hf::lemma::Generators;

#[derive(Parser)]
#[command(name = "sumok2set", version, about = "Translate SUMO-K knowledge bases into TH0 set theory problems")]
struct Cli {
    /// Configuration file (key = value lines, `[prover.NAME]` sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Default)]
struct Inputs {
    /// Knowledge base file (repeatable).
    #[arg(long = "kb")]
    kb: Vec<PathBuf>,
    /// Query file (repeatable).
    #[arg(long = "query")]
    query: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Premise selection file.
    #[arg(long)]
    selection: Option<PathBuf>,
    /// Extra head to skip as out of fragment (repeatable).
    #[arg(long = "skip")]
    skip: Vec<String>,
    /// Omit the date from problem headers.
    #[arg(long)]
    reproducible: bool,
    /// Declare this base type instead of using `$i`.
    #[arg(long)]
    base_type: Option<String>,
    /// Use the signature-specific row guard for relations with known domains.
    #[arg(long)]
    expand_row_guards: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate the knowledge base and write one problem file per query.
    Translate {
        #[command(flatten)]
        inputs: Inputs,
        /// Exit 0 even if some forms fail to parse or translate.
        #[arg(long)]
        keep_going: bool,
        /// Write diagnostics as JSON to this file (`-` for stdout).
        #[arg(long)]
        errors_json: Option<PathBuf>,
        /// Write guard derivations to guards.txt.
        #[arg(long)]
        explain_guards: bool,
        /// Write the analysed signature to signature.txt.
        #[arg(long)]
        dump_signature: bool,
    },
    /// Run provers on problems and tabulate the outcomes.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        /// Problem file or directory of `.p` files (repeatable).
        #[arg(long = "problem")]
        problem: Vec<PathBuf>,
        /// Prover as `name=command args…` with `{file}` and `{timeout}` holes (repeatable).
        #[arg(long = "prover")]
        prover: Vec<String>,
        /// Wall-clock limit per run, in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// Concurrent prover runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check a lemma file over bounded hereditarily finite sets.
    Oracle {
        lemmas: PathBuf,
        #[arg(long, default_value_t = 3)]
        set_rank: u32,
        #[arg(long, default_value_t = 4)]
        list_len: usize,
        #[arg(long, default_value_t = 2)]
        entry_rank: u32,
    },
    /// Re-parse problem files and report syntax errors.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn config(path: Option<&PathBuf>, inputs: &Inputs) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.kb.extend(inputs.kb.iter().cloned());
    cfg.queries.extend(inputs.query.iter().cloned());
    cfg.skip_heads.extend(inputs.skip.iter().cloned());
    if let Some(o) = &inputs.out {
        cfg.out = o.clone();
    }
    if inputs.selection.is_some() {
        cfg.selection = inputs.selection.clone();
    }
    Ok(cfg)
}

fn flags(inputs: &Inputs) -> TranslateFlags {
    TranslateFlags {
        reproducible: inputs.reproducible,
        base_type: inputs.base_type.clone(),
        expand_row_guards: inputs.expand_row_guards,
        ..TranslateFlags::default()
    }
}

fn main_inner(cli: Cli) -> Result<i32> {
    match cli.command {
        Cmd::Translate {
            inputs,
            keep_going,
            errors_json,
            explain_guards,
            dump_signature,
        } => {
            let cfg = config(cli.config.as_ref(), &inputs)?;
            let f = TranslateFlags {
                keep_going,
                errors_json,
                explain_guards,
                dump_signature,
                ..flags(&inputs)
            };
            Ok(commands::translate(&cfg, &f)?.exit)
        }
        Cmd::Run {
            inputs,
            problem,
            prover,
            timeout,
            jobs,
        } => {
            let mut cfg = config(cli.config.as_ref(), &inputs)?;
            cfg.problems.extend(problem);
            for p in &prover {
                cfg.provers.push(ProverDef::parse_inline(p)?);
            }
            if let Some(t) = timeout {
                cfg.timeout = t;
            }
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            cfg.validate()?;
            let report = commands::run(&cfg, &flags(&inputs))?;
            if let Some(t) = &report.table {
                print!("{}", t.text());
            }
            Ok(report.exit)
        }
        Cmd::Oracle {
            lemmas,
            set_rank,
            list_len,
            entry_rank,
        } => commands::oracle(
            &lemmas,
            &Generators {
                set_rank,
                list_len,
                entry_rank,
            },
        ),
        Cmd::Check { files } => commands::check(&files),
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
