//! Bounded identity checking and lemma files.
//!
//! A lemma file holds one `name: <formula>` per line in the emitter's term syntax;
//! blank lines and `#` comments are ignored. The top-level universal prefix is
//! enumerated explicitly so that failures report an assignment.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::eval::{Domain, Env, EvalError, Evaluator, Value};
use super::{list_table, Hf};
use crate::host::{self, HostTerm, HostType};
use crate::th0::parse::parse_term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generators {
    /// Sets of rank at most this.
    pub set_rank: u32,
    /// Lists up to this length.
    pub list_len: usize,
    /// List entries (before tagging) of rank at most this.
    pub entry_rank: u32,
}

impl Default for Generators {
    fn default() -> Self {
        Generators {
            set_rank: 3,
            list_len: 4,
            entry_rank: 2,
        }
    }
}

impl Generators {
    pub fn domain(&self) -> Domain {
        let entries = Hf::up_to_rank(self.entry_rank);
        let mut lists = Vec::new();
        let mut layer: Vec<Vec<Hf>> = vec![Vec::new()];
        for _ in 0..=self.list_len {
            lists.extend(layer.iter().map(|l| Value::table(list_table(l))));
            layer = layer
                .iter()
                .flat_map(|l| {
                    entries.iter().map(move |e| {
                        let mut next = l.clone();
                        next.push(*e);
                        next
                    })
                })
                .collect();
        }
        Domain {
            sets: Hf::up_to_rank(self.set_rank),
            lists,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { assignments: usize },
    /// The first failing assignment, in binder order.
    Fail { assignment: Vec<(String, String)> },
    Error(EvalError),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass { assignments } => write!(f, "pass ({assignments} assignments)"),
            Verdict::Fail { assignment } => {
                let parts: Vec<String> = assignment.iter().map(|(x, v)| format!("{x}={v}")).collect();
                write!(f, "FAIL at {}", parts.join(", "))
            }
            Verdict::Error(e) => write!(f, "ERROR {e}"),
        }
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::Fun(func) => match &**func {
            super::eval::Func::Table(t) => {
                let items: Vec<String> = t
                    .values()
                    .map(|e| e.sole().map_or_else(|| format!("raw {e}"), |x| x.to_string()))
                    .collect();
                format!("[{}]", items.join(","))
            }
            _ => format!("{v:?}"),
        },
        other => format!("{other:?}"),
    }
}

/// Checks a closed formula: its leading universal binders range over the generated
/// values and any unbounded quantifier below ranges over the same values.
pub fn check_formula(formula: &HostTerm, gens: &Generators) -> Verdict {
    let mut vars: Vec<(String, HostType)> = Vec::new();
    let mut body = formula;
    while let HostTerm::All(x, ty, b) = body {
        vars.push((x.clone(), ty.clone()));
        body = b;
    }
    if let Some((x, _)) = formula.free_vars().first() {
        return Verdict::Error(EvalError::NotEvaluable(format!("free variable {x}")));
    }
    let domain = Rc::new(gens.domain());
    let choices: Vec<Vec<Value>> = match vars
        .iter()
        .map(|(x, ty)| match ty {
            HostType::Iota => Ok(domain.sets.iter().map(|h| Value::Set(*h)).collect()),
            HostType::Omicron => Ok(vec![Value::Prop(false), Value::Prop(true)]),
            t if *t == HostType::list() => Ok(domain.lists.clone()),
            t => Err(EvalError::NotEvaluable(format!("no generator for {x}: {t}"))),
        })
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(c) => c,
        Err(e) => return Verdict::Error(e),
    };
    let mut ev = Evaluator::new();
    ev.domain = Some(domain);
    // Odometer over the choices; the last binder varies fastest.
    let mut idx = vec![0usize; vars.len()];
    let mut count = 0;
    if choices.iter().any(Vec::is_empty) {
        return Verdict::Pass { assignments: 0 };
    }
    loop {
        let env = vars
            .iter()
            .zip(&idx)
            .enumerate()
            .fold(Env::default(), |env, (k, ((x, _), i))| env.bind(x, choices[k][*i].clone()));
        ev.refuel();
        match ev.eval_prop(body, &env) {
            Ok(true) => count += 1,
            Ok(false) => {
                return Verdict::Fail {
                    assignment: vars
                        .iter()
                        .zip(&idx)
                        .enumerate()
                        .map(|(k, ((x, _), i))| (x.clone(), show(&choices[k][*i])))
                        .collect(),
                }
            }
            Err(e) => return Verdict::Error(e),
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Verdict::Pass { assignments: count };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `lhs = rhs` for all generated values of their free variables.
pub fn check_identity(lhs: &HostTerm, rhs: &HostTerm, gens: &Generators) -> Verdict {
    let (tl, tr) = match (lhs.typecheck(), rhs.typecheck()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Verdict::Error(EvalError::Type(e.to_string())),
    };
    if tl != tr {
        return Verdict::Error(EvalError::Type(format!("sides have types {tl} and {tr}")));
    }
    let mut vars = lhs.free_vars();
    for v in rhs.free_vars() {
        if !vars.iter().any(|(n, _)| *n == v.0) {
            vars.push(v);
        }
    }
    check_formula(&host::all_many(&vars, host::eq(tl, lhs.clone(), rhs.clone())), gens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub name: String,
    pub line: usize,
    pub formula: HostTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct LemmaError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_lemmas(text: &str) -> Result<Vec<Lemma>, LemmaError> {
    let mut out: Vec<Lemma> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (name, formula) = trimmed.split_once(':').ok_or_else(|| LemmaError {
            line,
            msg: "expected `name: formula`".into(),
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(LemmaError {
                line,
                msg: format!("invalid lemma name {name:?}"),
            });
        }
        if out.iter().any(|l| l.name == name) {
            return Err(LemmaError {
                line,
                msg: format!("duplicate lemma name {name}"),
            });
        }
        let formula = parse_term(formula).map_err(|e| LemmaError {
            line,
            msg: format!("column {}: {}", e.col + name.len() + 1, e.msg),
        })?;
        match formula.typecheck() {
            Ok(HostType::Omicron) => {}
            Ok(t) => {
                return Err(LemmaError {
                    line,
                    msg: format!("lemma has type {t}, not $o"),
                })
            }
            Err(e) => return Err(LemmaError { line, msg: e.to_string() }),
        }
        out.push(Lemma {
            name: name.to_string(),
            line,
            formula,
        });
    }
    Ok(out)
}

pub fn check_lemma(lemma: &Lemma, gens: &Generators) -> Verdict {
    check_formula(&lemma.formula, gens)
}

/// Results keyed by lemma name, in file order.
pub fn check_all(lemmas: &[Lemma], gens: &Generators) -> Vec<(String, Verdict)> {
    lemmas.iter().map(|l| (l.name.clone(), check_lemma(l, gens))).collect()
}

/// Builds the map `i ↦ D i` for a finite domain sequence.
pub fn domain_table(classes: &[Hf]) -> BTreeMap<Hf, Hf> {
    classes
        .iter()
        .enumerate()
        .map(|(k, c)| (Hf::ordinal(k as u32), *c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::{call, cst, ivar, var};

    #[test]
    fn domain_sizes() {
        let d = Generators::default().domain();
        assert_eq!(d.sets.len(), 16);
        assert_eq!(d.lists.len(), 341);
    }

    #[test]
    fn identity_pass_and_fail() {
        let x = ivar("x");
        let ok = check_identity(&call("untag", [call("tag", [x.clone()])]), &x, &Generators::default());
        assert_eq!(ok, Verdict::Pass { assignments: 16 });
        let r = var("@R", HostType::list());
        let bad = check_identity(
            &call("len", [call("cons", [x.clone(), r.clone()])]),
            &call("len", [r]),
            &Generators::default(),
        );
        assert_eq!(
            bad,
            Verdict::Fail {
                assignment: vec![("x".into(), "0".into()), ("@R".into(), "[]".into())]
            }
        );
    }

    #[test]
    fn type_mismatch_is_an_error() {
        let v = check_identity(&cst("n0"), &HostTerm::Top, &Generators::default());
        assert!(matches!(v, Verdict::Error(EvalError::Type(_))));
    }

    #[test]
    fn lemma_file_parsing() {
        let text = "# c\n\none: ((len @ nil) = n0)\n";
        let ls = parse_lemmas(text).unwrap();
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].line, 3);
        assert!(check_lemma(&ls[0], &Generators::default()).passed());
        let e = parse_lemmas("a: ((len @ nil) = n0\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_lemmas("no colon here").is_err());
        assert!(parse_lemmas("").unwrap().is_empty());
    }
}
