//! The four subcommands. Each returns the process exit code.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use sumok2set_core::guards::GuardOptions;
use sumok2set_core::hf::lemma::{check_all, parse_lemmas, Generators};
use sumok2set_core::lower::LowerConfig;
use sumok2set_core::pipeline::{load_kb, load_query, KbSummary, LoadError, Source};
use sumok2set_core::sexpr::Span;
use sumok2set_core::th0::{self, check_syntax, EmitOptions};
use sumok2set_core::signature::analyze;
use sumok2set_core::translate::{build_query_problem, parse_selection, KbTranslation, TranslateOptions, Translator};

use crate::config::Config;
use crate::harness::{run_all, Job, RunRecord};
use crate::table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MISSING: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct TranslateFlags {
    pub reproducible: bool,
    pub keep_going: bool,
    pub errors_json: Option<PathBuf>,
    pub explain_guards: bool,
    pub dump_signature: bool,
    pub base_type: Option<String>,
    pub expand_row_guards: bool,
}

/// One reported problem with an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl Diagnostic {
    fn at(span: Option<&Span>, fallback: &str, message: String) -> Diagnostic {
        match span {
            Some(s) => Diagnostic {
                file: s.file.to_string(),
                line: s.line,
                col: s.col,
                message,
            },
            None => Diagnostic {
                file: fallback.to_string(),
                line: 0,
                col: 0,
                message,
            },
        }
    }

    fn from_load(e: &LoadError, fallback: &str) -> Diagnostic {
        match e.location() {
            Some((file, line, col)) => {
                let text = e.to_string();
                let prefix = format!("{file}:{line}:{col}: ");
                Diagnostic {
                    message: text.strip_prefix(&prefix).unwrap_or(&text).to_string(),
                    file,
                    line,
                    col,
                }
            }
            None => Diagnostic::at(None, fallback, e.to_string()),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.col, self.message)
    }
}

/// What a translation run produced.
#[derive(Debug, Clone, Default)]
pub struct TranslateReport {
    pub problems: Vec<PathBuf>,
    pub diagnostics: Vec<Diagnostic>,
    pub summary: KbSummary,
    pub exit: i32,
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<Source>, PathBuf> {
    paths
        .iter()
        .map(|p| {
            fs::read_to_string(p)
                .map(|text| Source::new(p.to_string_lossy(), text))
                .map_err(|_| p.clone())
        })
        .collect()
}

fn now() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Translates the knowledge base and writes one problem per query.
pub fn translate(cfg: &Config, flags: &TranslateFlags) -> Result<TranslateReport> {
    let mut report = TranslateReport::default();
    // Everything is read before anything is written.
    let (kb_src, query_src, selection) = match (|| {
        let kb = read_all(&cfg.kb)?;
        let qs = read_all(&cfg.queries)?;
        let sel = match &cfg.selection {
            Some(p) => Some(fs::read_to_string(p).map_err(|_| p.clone())?),
            None => None,
        };
        Ok::<_, PathBuf>((kb, qs, sel))
    })() {
        Ok(v) => v,
        Err(missing) => {
            eprintln!("error: cannot read {}", missing.display());
            report.exit = EXIT_MISSING;
            return Ok(report);
        }
    };
    let selection = selection.map(|t| parse_selection(&t));

    let mut lower_cfg = LowerConfig::default();
    lower_cfg.skip_heads.extend(cfg.skip_heads.iter().cloned());
    let opts = TranslateOptions {
        guards: GuardOptions {
            expand_known_row_guards: flags.expand_row_guards,
            ..GuardOptions::default()
        },
        ..TranslateOptions::default()
    };

    let loaded = load_kb(&kb_src, &lower_cfg);
    for e in &loaded.errors {
        report.diagnostics.push(Diagnostic::from_load(e, "kb"));
    }
    let kb = match KbTranslation::new(loaded.assertions.clone(), opts) {
        Ok(kb) => kb,
        Err(e) => {
            report.diagnostics.push(Diagnostic::at(None, "kb", format!("signature: {e}")));
            KbTranslation::with_signature(Vec::new(), Default::default(), opts)
        }
    };
    for (name, e) in &kb.errors {
        report
            .diagnostics
            .push(Diagnostic::at(loaded.locations.get(name), name, format!("{name}: {e}")));
    }
    report.summary = KbSummary::new(kb_src.len(), &loaded, &kb);

    let emit_opts = EmitOptions {
        date: (!flags.reproducible).then(now),
        base: flags.base_type.clone(),
        ..EmitOptions::default()
    };
    let kb_paths: Vec<String> = kb_src.iter().map(|s| s.path.clone()).collect();
    let mut labels = BTreeSet::new();
    let mut rendered: Vec<(String, String)> = Vec::new();
    let mut explanations: Vec<(String, String)> = kb.explanations.clone();
    for src in &query_src {
        let q = match load_query(src, &lower_cfg) {
            Ok(q) => q,
            Err(e) => {
                report.diagnostics.push(Diagnostic::from_load(&e, &src.path));
                continue;
            }
        };
        if !labels.insert(q.label.clone()) {
            report.diagnostics.push(Diagnostic::at(
                q.locations.get("conj"),
                &src.path,
                format!("duplicate problem label {}", q.label),
            ));
            continue;
        }
        match build_query_problem(&q.label, &kb, &q.locals, &q.query, selection.as_deref(), opts) {
            Ok(p) => {
                let sources = kb_paths.iter().cloned().chain([src.path.clone()]).collect();
                let text = th0::render(&p, &EmitOptions { sources, ..emit_opts.clone() });
                rendered.push((q.label.clone(), text));
                if flags.explain_guards {
                    let formulas: Vec<_> =
                        kb.assertions.iter().chain(&q.locals).map(|a| a.formula.clone()).collect();
                    let sig = analyze(&formulas, opts.collect).map(|(s, _)| s).unwrap_or_default();
                    let mut tr = Translator::new(&sig, opts);
                    for l in &q.locals {
                        if tr.assertion(&l.formula).is_ok() {
                            let text = tr.take_explanations().concat();
                            if !text.is_empty() {
                                explanations.push((format!("{}/{}", q.label, l.name), text));
                            }
                        }
                    }
                }
            }
            Err(e) => report.diagnostics.push(Diagnostic::at(
                q.locations.get("conj"),
                &src.path,
                format!("{}: {e}", q.label),
            )),
        }
    }

    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    for (label, text) in &rendered {
        let path = cfg.out.join(format!("{label}.p"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        report.problems.push(path);
    }
    fs::write(cfg.out.join("kb-summary.txt"), report.summary.to_string())?;
    if flags.explain_guards {
        let text: String = explanations.iter().map(|(n, t)| format!("{n}:\n{t}\n")).collect();
        fs::write(cfg.out.join("guards.txt"), text)?;
    }
    if flags.dump_signature {
        fs::write(cfg.out.join("signature.txt"), kb.signature.dump())?;
    }
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    if let Some(path) = &flags.errors_json {
        let items: Vec<_> = report
            .diagnostics
            .iter()
            .map(|d| json!({"file": d.file, "line": d.line, "col": d.col, "message": d.message}))
            .collect();
        let text = serde_json::to_string_pretty(&items)? + "\n";
        if path.as_os_str() == "-" {
            print!("{text}");
        } else {
            fs::write(path, text)?;
        }
    }
    report.exit = if report.diagnostics.is_empty() || flags.keep_going {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    Ok(report)
}

/// Problem files named directly or found (as `*.p`) in named directories.
pub fn collect_problems(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "p"))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            bail!("no such problem file or directory: {}", p.display());
        }
    }
    Ok(out)
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned())
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub exit: i32,
    pub records: Vec<RunRecord>,
    pub table: Option<Table>,
}

/// Translates any configured queries, then runs every prover on every problem.
pub fn run(cfg: &Config, flags: &TranslateFlags) -> Result<RunReport> {
    if cfg.provers.is_empty() {
        bail!("no provers configured");
    }
    let mut files = Vec::new();
    if !cfg.queries.is_empty() {
        let rep = translate(cfg, &TranslateFlags { keep_going: true, ..flags.clone() })?;
        if rep.exit == EXIT_MISSING {
            return Ok(RunReport {
                exit: EXIT_MISSING,
                records: Vec::new(),
                table: None,
            });
        }
        files.extend(rep.problems);
    }
    files.extend(collect_problems(&cfg.problems)?);
    let mut seen = BTreeSet::new();
    let jobs: Vec<Job> = files
        .into_iter()
        .filter(|p| seen.insert(p.clone()))
        .map(|p| Job {
            label: label_of(&p),
            path: p,
        })
        .collect();
    let records = run_all(&jobs, &cfg.provers, cfg.timeout, cfg.jobs);
    let names: Vec<String> = cfg.provers.iter().map(|p| p.name.clone()).collect();
    let table = Table::from_records(&names, &records);

    fs::create_dir_all(&cfg.out)?;
    let mut runs = String::from(RunRecord::TSV_HEADER);
    runs.push('\n');
    for r in &records {
        runs.push_str(&r.tsv());
        runs.push('\n');
    }
    fs::write(cfg.out.join("runs.tsv"), runs)?;
    fs::write(cfg.out.join("results.tsv"), table.tsv())?;
    fs::write(cfg.out.join("results.txt"), table.text())?;
    Ok(RunReport {
        exit: EXIT_OK,
        records,
        table: Some(table),
    })
}

/// Checks a lemma file; prints one verdict per lemma.
pub fn oracle(path: &Path, gens: &Generators) -> Result<i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Ok(EXIT_MISSING);
        }
    };
    let lemmas = match parse_lemmas(&text) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{}:{}: {}", path.display(), e.line, e.msg);
            return Ok(EXIT_FAIL);
        }
    };
    let mut ok = true;
    for (lemma, (_, verdict)) in lemmas.iter().zip(check_all(&lemmas, gens)) {
        println!("{}:{}: {}: {verdict}", path.display(), lemma.line, lemma.name);
        ok &= verdict.passed();
    }
    println!("{} lemmas checked", lemmas.len());
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

/// Re-parses emitted problem files.
pub fn check(paths: &[PathBuf]) -> Result<i32> {
    let mut ok = true;
    for p in collect_problems(paths)? {
        let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        let errs = check_syntax(&text);
        if errs.is_empty() {
            println!("{}: ok", p.display());
        }
        for e in errs {
            ok = false;
            println!("{}:{}:{}: {}", p.display(), e.line, e.col, e.msg);
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}
