//! Lowering of s-expressions into the SUMO-K syntax tree.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{ArithOp, Builtin, Head, Rat, SumoFormula, SumoSpine, SumoTerm};
use crate::sexpr::{is_numeral, AtomKind, SExpr, Span};

/// Heads treated as outside the fragment. Any form mentioning one is skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerConfig {
    pub skip_heads: BTreeSet<String>,
}

impl Default for LowerConfig {
    fn default() -> Self {
        LowerConfig {
            skip_heads: ["modalAttribute", "holdsDuring"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl LowerConfig {
    pub fn with_skip_heads<I, S>(heads: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        LowerConfig {
            skip_heads: heads.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerResult {
    Assertion(SumoFormula),
    Query(SumoFormula),
    /// Holds the out-of-fragment head that caused the skip.
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerError {
    #[error("{0}: more than one row variable in an argument list")]
    TwoRowVarsInSpine(Span),
    #[error("{0}: malformed binder")]
    MalformedBinder(Span),
    #[error("{0}: unknown syntax: {1}")]
    UnknownSyntax(Span, String),
    #[error("{0}: bad numeral {1}")]
    BadNumeral(Span, String),
}

impl LowerError {
    pub fn span(&self) -> &Span {
        match self {
            LowerError::TwoRowVarsInSpine(s)
            | LowerError::MalformedBinder(s)
            | LowerError::UnknownSyntax(s, _)
            | LowerError::BadNumeral(s, _) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad numeral {0:?}")]
pub struct BadNumeral(pub String);

/// Parses a finite decimal into its normalized `(numerator, scale)` form.
pub fn parse_numeral(lexeme: &str) -> Result<Rat, BadNumeral> {
    if !is_numeral(lexeme) {
        return Err(BadNumeral(lexeme.to_string()));
    }
    let (negative, body) = match lexeme.as_bytes()[0] {
        b'-' => (true, &lexeme[1..]),
        b'+' => (false, &lexeme[1..]),
        _ => (false, lexeme),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let magnitude: i128 = digits.parse().map_err(|_| BadNumeral(lexeme.to_string()))?;
    let scale = u32::try_from(frac.len()).map_err(|_| BadNumeral(lexeme.to_string()))?;
    Ok(Rat::new(if negative { -magnitude } else { magnitude }, scale))
}

const FORMULA_HEADS: &[&str] = &[
    "forall",
    "exists",
    "and",
    "or",
    "not",
    "=>",
    "<=>",
    "equal",
    "instance",
    "subclass",
    "lessThan",
    "lessThanOrEqualTo",
    "greaterThan",
    "greaterThanOrEqualTo",
];

fn unknown(span: &Span, what: impl Into<String>) -> LowerError {
    LowerError::UnknownSyntax(span.clone(), what.into())
}

/// Lowers one top-level form using the default skip-list.
pub fn lower(form: &SExpr) -> Result<LowerResult, LowerError> {
    lower_with(form, &LowerConfig::default())
}

pub fn lower_with(form: &SExpr, config: &LowerConfig) -> Result<LowerResult, LowerError> {
    if let Some(h) = first_skipped_head(form, config) {
        return Ok(LowerResult::Skipped(h));
    }
    if form.head_constant() == Some("query") {
        let items = form.as_list().unwrap_or_default();
        if items.len() != 2 {
            return Err(unknown(form.span(), "query takes exactly one formula"));
        }
        return Ok(LowerResult::Query(lower_formula(&items[1])?));
    }
    Ok(LowerResult::Assertion(lower_formula(form)?))
}

fn first_skipped_head(form: &SExpr, config: &LowerConfig) -> Option<String> {
    let items = form.as_list()?;
    if let Some(h) = form.head_constant() {
        if config.skip_heads.contains(h) {
            return Some(h.to_string());
        }
    }
    items.iter().find_map(|i| first_skipped_head(i, config))
}

fn two_terms(items: &[SExpr], span: &Span) -> Result<(SumoTerm, SumoTerm), LowerError> {
    match items {
        [_, a, b] => Ok((lower_term(a)?, lower_term(b)?)),
        _ => Err(unknown(span, "expected exactly two arguments")),
    }
}

fn formula_list(items: &[SExpr]) -> Result<Vec<SumoFormula>, LowerError> {
    items.iter().map(lower_formula).collect()
}

/// Binder list of a quantifier: each entry is `(name, is_row)`.
fn binder_vars(list: &SExpr, span: &Span) -> Result<Vec<(String, bool)>, LowerError> {
    let items = list
        .as_list()
        .filter(|i| !i.is_empty())
        .ok_or_else(|| LowerError::MalformedBinder(span.clone()))?;
    items
        .iter()
        .map(|i| match i.as_atom() {
            Some((name, AtomKind::Variable)) => Ok((name.to_string(), false)),
            Some((name, AtomKind::RowVariable)) => Ok((name.to_string(), true)),
            _ => Err(LowerError::MalformedBinder(span.clone())),
        })
        .collect()
}

fn binder_body(body: &SExpr, span: &Span) -> Result<SumoFormula, LowerError> {
    match body.as_atom() {
        Some(("True", AtomKind::Constant)) | Some(("False", AtomKind::Constant)) | None => {
            lower_formula(body)
        }
        Some(_) => Err(LowerError::MalformedBinder(span.clone())),
    }
}

fn quantifier(items: &[SExpr], span: &Span, universal: bool) -> Result<SumoFormula, LowerError> {
    let [_, vars, body] = items else {
        return Err(LowerError::MalformedBinder(span.clone()));
    };
    let vars = binder_vars(vars, span)?;
    let mut result = binder_body(body, span)?;
    // Split a mixed binder list into nested blocks, innermost first.
    let mut i = vars.len();
    while i > 0 {
        if vars[i - 1].1 {
            let name = vars[i - 1].0.clone();
            result = if universal {
                SumoFormula::ForallRow(name, Box::new(result))
            } else {
                SumoFormula::ExistsRow(name, Box::new(result))
            };
            i -= 1;
        } else {
            let mut j = i;
            while j > 0 && !vars[j - 1].1 {
                j -= 1;
            }
            let names = vars[j..i].iter().map(|(n, _)| n.clone()).collect();
            result = if universal {
                SumoFormula::ForallVars(names, Box::new(result))
            } else {
                SumoFormula::ExistsVars(names, Box::new(result))
            };
            i = j;
        }
    }
    Ok(result)
}

pub fn lower_formula(form: &SExpr) -> Result<SumoFormula, LowerError> {
    let span = form.span();
    let items = match form {
        SExpr::Atom { lexeme, kind, .. } => {
            return match (lexeme.as_str(), kind) {
                ("True", AtomKind::Constant) => Ok(SumoFormula::Top),
                ("False", AtomKind::Constant) => Ok(SumoFormula::Bot),
                _ => Err(unknown(span, format!("{form} is not a formula"))),
            };
        }
        SExpr::List { items, .. } => items,
    };
    let Some(first) = items.first() else {
        return Err(unknown(span, "empty list"));
    };
    let head = match first.as_atom() {
        Some((name, AtomKind::Constant)) => name,
        Some((name, AtomKind::Variable)) => {
            return Ok(SumoFormula::Atom {
                head: Head::Var(name.to_string()),
                spine: lower_spine(&items[1..], span)?,
            });
        }
        _ => return Err(unknown(span, format!("bad head {first}"))),
    };
    let f = match head {
        "not" => match items.as_slice() {
            [_, g] => SumoFormula::Not(Box::new(lower_formula(g)?)),
            _ => return Err(unknown(span, "not takes one formula")),
        },
        "=>" | "<=>" => match items.as_slice() {
            [_, a, b] => {
                let (a, b) = (Box::new(lower_formula(a)?), Box::new(lower_formula(b)?));
                if head == "=>" {
                    SumoFormula::Impl(a, b)
                } else {
                    SumoFormula::Iff(a, b)
                }
            }
            _ => return Err(unknown(span, format!("{head} takes two formulas"))),
        },
        "and" | "or" => {
            let mut parts = formula_list(&items[1..])?;
            match parts.len() {
                0 if head == "and" => SumoFormula::Top,
                0 => SumoFormula::Bot,
                1 => parts.pop().unwrap_or(SumoFormula::Top),
                _ if head == "and" => SumoFormula::And(parts),
                _ => SumoFormula::Or(parts),
            }
        }
        "forall" => quantifier(items, span, true)?,
        "exists" => quantifier(items, span, false)?,
        "equal" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Eq(a, b)
        }
        "instance" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Instance(a, b)
        }
        "subclass" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Subclass(a, b)
        }
        "lessThan" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Lt(a, b)
        }
        "lessThanOrEqualTo" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Le(a, b)
        }
        "greaterThan" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Lt(b, a)
        }
        "greaterThanOrEqualTo" => {
            let (a, b) = two_terms(items, span)?;
            SumoFormula::Le(b, a)
        }
        "query" => return Err(unknown(span, "nested query")),
        _ => SumoFormula::Atom {
            head: Head::Const(head.to_string()),
            spine: lower_spine(&items[1..], span)?,
        },
    };
    Ok(f)
}

fn term_has_row(t: &SumoTerm) -> bool {
    fn in_formula(f: &SumoFormula) -> bool {
        use SumoFormula::*;
        match f {
            Bot | Top => false,
            Not(g) => in_formula(g),
            Impl(a, b) | Iff(a, b) => in_formula(a) || in_formula(b),
            And(v) | Or(v) => v.iter().any(in_formula),
            ForallVars(_, b) | ExistsVars(_, b) | ForallRow(_, b) | ExistsRow(_, b) => {
                in_formula(b)
            }
            Eq(a, b) | Instance(a, b) | Subclass(a, b) | Le(a, b) | Lt(a, b) => {
                term_has_row(a) || term_has_row(b)
            }
            Atom { spine, .. } => spine_has_row(spine),
        }
    }
    fn spine_has_row(s: &SumoSpine) -> bool {
        s.row_var().is_some() || s.all_terms().any(term_has_row)
    }
    match t {
        SumoTerm::Var(_) | SumoTerm::Const(_) | SumoTerm::Rat(_) | SumoTerm::Builtin(_) => false,
        SumoTerm::Apply { spine, .. } => spine_has_row(spine),
        SumoTerm::Kappa { body, .. } => in_formula(body),
        SumoTerm::Arith { left, right, .. } => term_has_row(left) || term_has_row(right),
        SumoTerm::Embed(f) => in_formula(f),
    }
}

fn lower_spine(args: &[SExpr], _span: &Span) -> Result<SumoSpine, LowerError> {
    let mut prefix = Vec::new();
    let mut row: Option<String> = None;
    let mut suffix = Vec::new();
    for arg in args {
        if let Some((name, AtomKind::RowVariable)) = arg.as_atom() {
            if row.is_some() {
                return Err(LowerError::TwoRowVarsInSpine(arg.span().clone()));
            }
            row = Some(name.to_string());
            continue;
        }
        let t = lower_term(arg)?;
        if row.is_some() {
            if term_has_row(&t) {
                return Err(LowerError::TwoRowVarsInSpine(arg.span().clone()));
            }
            suffix.push(t);
        } else {
            prefix.push(t);
        }
    }
    Ok(match row {
        None => SumoSpine::Terms(prefix),
        Some(row) => SumoSpine::RowTail {
            prefix,
            row,
            suffix,
        },
    })
}

pub fn lower_term(form: &SExpr) -> Result<SumoTerm, LowerError> {
    let span = form.span();
    let items = match form {
        SExpr::Atom { lexeme, kind, .. } => {
            return match kind {
                AtomKind::Constant => Ok(match Builtin::from_kif(lexeme) {
                    Some(b) => SumoTerm::Builtin(b),
                    None => SumoTerm::Const(lexeme.clone()),
                }),
                AtomKind::Variable => Ok(SumoTerm::Var(lexeme.clone())),
                AtomKind::Numeral => parse_numeral(lexeme)
                    .map(SumoTerm::Rat)
                    .map_err(|_| LowerError::BadNumeral(span.clone(), lexeme.clone())),
                AtomKind::RowVariable => Err(unknown(span, "row variable outside an argument list")),
                AtomKind::Str => Err(unknown(span, "string literal")),
            };
        }
        SExpr::List { items, .. } => items,
    };
    let Some(first) = items.first() else {
        return Err(unknown(span, "empty list"));
    };
    match first.as_atom() {
        Some((name, AtomKind::Constant)) if FORMULA_HEADS.contains(&name) => {
            Ok(SumoTerm::Embed(Box::new(lower_formula(form)?)))
        }
        Some(("KappaFn", AtomKind::Constant)) => match items.as_slice() {
            [_, var, body] => match var.as_atom() {
                Some((v, AtomKind::Variable)) => Ok(SumoTerm::Kappa {
                    var: v.to_string(),
                    body: Box::new(binder_body(body, span)?),
                }),
                _ => Err(LowerError::MalformedBinder(span.clone())),
            },
            _ => Err(LowerError::MalformedBinder(span.clone())),
        },
        Some((name, AtomKind::Constant)) => match ArithOp::from_kif(name) {
            Some(op) => {
                let (left, right) = two_terms(items, span)?;
                Ok(SumoTerm::Arith {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
            None => Ok(SumoTerm::Apply {
                head: Head::Const(name.to_string()),
                spine: lower_spine(&items[1..], span)?,
            }),
        },
        Some((name, AtomKind::Variable)) => Ok(SumoTerm::Apply {
            head: Head::Var(name.to_string()),
            spine: lower_spine(&items[1..], span)?,
        }),
        _ => Err(unknown(span, format!("bad head {first}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_forms;

    fn lower_str(src: &str) -> Result<LowerResult, LowerError> {
        lower(&parse_forms(src).unwrap()[0])
    }

    fn int(n: i128) -> SumoTerm {
        SumoTerm::Rat(Rat::integer(n))
    }

    #[test]
    fn query_with_arithmetic() {
        let r = lower_str("(query (equal 12 (MultiplicationFn 3 4)))").unwrap();
        assert_eq!(
            r,
            LowerResult::Query(SumoFormula::Eq(
                int(12),
                SumoTerm::Arith {
                    op: ArithOp::Mul,
                    left: Box::new(int(3)),
                    right: Box::new(int(4)),
                }
            ))
        );
    }

    #[test]
    fn modal_rule_is_skipped() {
        let r = lower_str("(=> (modalAttribute ?F Necessity) (modalAttribute ?F Possibility))");
        assert_eq!(r.unwrap(), LowerResult::Skipped("modalAttribute".into()));
        let custom = LowerConfig::with_skip_heads(["believes"]);
        let form = &parse_forms("(believes Bob (instance Bob Human))").unwrap()[0];
        assert_eq!(
            lower_with(form, &custom).unwrap(),
            LowerResult::Skipped("believes".into())
        );
    }

    #[test]
    fn binder_body_must_be_a_formula() {
        assert!(matches!(
            lower_str("(forall (?X) ?X-is-not-a-formula)"),
            Err(LowerError::MalformedBinder(_))
        ));
        assert!(matches!(
            lower_str("(forall ?X (p ?X))"),
            Err(LowerError::MalformedBinder(_))
        ));
        assert!(matches!(
            lower_str("(exists () (p a))"),
            Err(LowerError::MalformedBinder(_))
        ));
        assert!(matches!(
            lower_str("(instance o (KappaFn Foo (p Foo)))"),
            Err(LowerError::MalformedBinder(_))
        ));
    }

    #[test]
    fn two_row_variables_rejected() {
        assert!(matches!(
            lower_str("(p @A @B)"),
            Err(LowerError::TwoRowVarsInSpine(s)) if s.col == 7
        ));
        assert!(matches!(
            lower_str("(p @A (f @B))"),
            Err(LowerError::TwoRowVarsInSpine(_))
        ));
        // A row variable inside a prefix term belongs to that term's own spine.
        assert!(lower_str("(p (f @B) @A)").is_ok());
    }

    #[test]
    fn row_spine_shapes() {
        let r = lower_str("(p a @ROW b)").unwrap();
        assert_eq!(
            r,
            LowerResult::Assertion(SumoFormula::Atom {
                head: Head::Const("p".into()),
                spine: SumoSpine::RowTail {
                    prefix: vec![SumoTerm::Const("a".into())],
                    row: "ROW".into(),
                    suffix: vec![SumoTerm::Const("b".into())],
                },
            })
        );
    }

    #[test]
    fn strings_are_outside_the_fragment() {
        assert!(matches!(
            lower_str("(documentation foo EnglishLanguage \"text\")"),
            Err(LowerError::UnknownSyntax(..))
        ));
    }

    #[test]
    fn mixed_binder_list_nests() {
        let r = lower_str("(forall (?X @R ?Y) (p ?X @R ?Y))").unwrap();
        let LowerResult::Assertion(SumoFormula::ForallVars(xs, body)) = r else {
            panic!("expected forall");
        };
        assert_eq!(xs, vec!["X".to_string()]);
        let SumoFormula::ForallRow(r, body) = *body else {
            panic!("expected row binder");
        };
        assert_eq!(r, "R");
        assert!(matches!(*body, SumoFormula::ForallVars(ref ys, _) if ys == &["Y".to_string()]));
    }

    #[test]
    fn builtins_kappa_and_embedding() {
        let r = lower_str(
            "(instance o (KappaFn ?P (and (instance ?P Planet) (attribute ?P Earthlike))))",
        )
        .unwrap();
        let LowerResult::Assertion(SumoFormula::Instance(_, SumoTerm::Kappa { var, body })) = r
        else {
            panic!("expected kappa");
        };
        assert_eq!(var, "P");
        assert!(matches!(*body, SumoFormula::And(ref v) if v.len() == 2));

        let r = lower_str("(instance Number3-1 NonnegativeRealNumber)").unwrap();
        assert_eq!(
            r,
            LowerResult::Assertion(SumoFormula::Instance(
                SumoTerm::Const("Number3-1".into()),
                SumoTerm::Builtin(Builtin::Nonneg)
            ))
        );

        let r = lower_str("(holds (and (p a) (q b)) c)").unwrap();
        let LowerResult::Assertion(SumoFormula::Atom { spine, .. }) = r else {
            panic!()
        };
        assert!(matches!(spine.positional()[0], SumoTerm::Embed(_)));
    }

    #[test]
    fn wrong_arity_is_unknown_syntax() {
        assert!(matches!(lower_str("(instance a b c)"), Err(LowerError::UnknownSyntax(..))));
        assert!(matches!(lower_str("(=> (p a))"), Err(LowerError::UnknownSyntax(..))));
        assert!(lower_str("(AdditionFn 1)").is_ok());
        assert!(matches!(
            lower_str("(equal x (AdditionFn 1))"),
            Err(LowerError::UnknownSyntax(..))
        ));
    }

    #[test]
    fn numerals() {
        assert_eq!(parse_numeral("11.2").unwrap(), Rat { numerator: 112, scale: 1 });
        assert_eq!(parse_numeral("0").unwrap(), Rat { numerator: 0, scale: 0 });
        assert_eq!(parse_numeral("-3.50").unwrap(), Rat { numerator: -35, scale: 1 });
        assert_eq!(parse_numeral("-0.0").unwrap(), Rat::integer(0));
        assert!(parse_numeral("1e5").is_err());
        assert!(parse_numeral("999999999999999999999999999999999999999999").is_err());
    }
}
