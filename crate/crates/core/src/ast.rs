//! Abstract syntax of the SUMO-K fragment and its KIF rendering.

use std::fmt;

/// A signed decimal rational: `numerator / 10^scale`, with `scale` minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat {
    pub numerator: i128,
    pub scale: u32,
}

impl Rat {
    /// Builds a normalized rational by stripping trailing decimal zeros.
    pub fn new(mut numerator: i128, mut scale: u32) -> Self {
        while scale > 0 && numerator % 10 == 0 {
            numerator /= 10;
            scale -= 1;
        }
        Rat { numerator, scale }
    }

    pub fn integer(n: i128) -> Self {
        Rat {
            numerator: n,
            scale: 0,
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.numerator.unsigned_abs().to_string();
        let sign = if self.numerator < 0 { "-" } else { "" };
        let scale = self.scale as usize;
        if scale == 0 {
            return write!(f, "{sign}{digits}");
        }
        let padded = format!("{digits:0>width$}", width = scale + 1);
        let (int, frac) = padded.split_at(padded.len() - scale);
        write!(f, "{sign}{int}.{frac}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn kif_name(self) -> &'static str {
        match self {
            ArithOp::Add => "AdditionFn",
            ArithOp::Sub => "SubtractionFn",
            ArithOp::Mul => "MultiplicationFn",
            ArithOp::Div => "DivisionFn",
        }
    }

    pub fn from_kif(name: &str) -> Option<Self> {
        Some(match name {
            "AdditionFn" => ArithOp::Add,
            "SubtractionFn" => ArithOp::Sub,
            "MultiplicationFn" => ArithOp::Mul,
            "DivisionFn" => ArithOp::Div,
            _ => return None,
        })
    }
}

/// The three real-number classes with a fixed set-theoretic reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Real,
    Neg,
    Nonneg,
}

impl Builtin {
    pub fn kif_name(self) -> &'static str {
        match self {
            Builtin::Real => "RealNumber",
            Builtin::Neg => "NegativeRealNumber",
            Builtin::Nonneg => "NonnegativeRealNumber",
        }
    }

    pub fn from_kif(name: &str) -> Option<Self> {
        Some(match name {
            "RealNumber" => Builtin::Real,
            "NegativeRealNumber" => Builtin::Neg,
            "NonnegativeRealNumber" => Builtin::Nonneg,
            _ => return None,
        })
    }
}

/// Head of an applied term or atomic formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SumoTerm {
    Var(String),
    Const(String),
    Rat(Rat),
    Apply { head: Head, spine: SumoSpine },
    Kappa { var: String, body: Box<SumoFormula> },
    Arith {
        op: ArithOp,
        left: Box<SumoTerm>,
        right: Box<SumoTerm>,
    },
    Builtin(Builtin),
    /// A logical formula used where a set is expected.
    Embed(Box<SumoFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SumoSpine {
    Terms(Vec<SumoTerm>),
    RowTail {
        prefix: Vec<SumoTerm>,
        row: String,
        suffix: Vec<SumoTerm>,
    },
}

impl SumoSpine {
    pub fn empty() -> Self {
        SumoSpine::Terms(Vec::new())
    }

    pub fn row(name: &str) -> Self {
        SumoSpine::RowTail {
            prefix: Vec::new(),
            row: name.to_string(),
            suffix: Vec::new(),
        }
    }

    pub fn row_var(&self) -> Option<&str> {
        match self {
            SumoSpine::Terms(_) => None,
            SumoSpine::RowTail { row, .. } => Some(row),
        }
    }

    /// Terms at known 0-based positions: the whole list, or the prefix before the row.
    pub fn positional(&self) -> &[SumoTerm] {
        match self {
            SumoSpine::Terms(items) => items,
            SumoSpine::RowTail { prefix, .. } => prefix,
        }
    }

    pub fn all_terms(&self) -> impl Iterator<Item = &SumoTerm> {
        let (a, b): (&[SumoTerm], &[SumoTerm]) = match self {
            SumoSpine::Terms(items) => (items, &[]),
            SumoSpine::RowTail { prefix, suffix, .. } => (prefix, suffix),
        };
        a.iter().chain(b.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SumoFormula {
    Bot,
    Top,
    Not(Box<SumoFormula>),
    Impl(Box<SumoFormula>, Box<SumoFormula>),
    Iff(Box<SumoFormula>, Box<SumoFormula>),
    And(Vec<SumoFormula>),
    Or(Vec<SumoFormula>),
    ForallVars(Vec<String>, Box<SumoFormula>),
    ExistsVars(Vec<String>, Box<SumoFormula>),
    ForallRow(String, Box<SumoFormula>),
    ExistsRow(String, Box<SumoFormula>),
    Eq(SumoTerm, SumoTerm),
    Instance(SumoTerm, SumoTerm),
    Subclass(SumoTerm, SumoTerm),
    Le(SumoTerm, SumoTerm),
    Lt(SumoTerm, SumoTerm),
    Atom { head: Head, spine: SumoSpine },
}

/// Whether a variable is an ordinary (set) variable or a row variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarSort {
    Individual,
    Row,
}

impl SumoFormula {
    pub fn atom(head: &str, args: Vec<SumoTerm>) -> Self {
        SumoFormula::Atom {
            head: Head::Const(head.to_string()),
            spine: SumoSpine::Terms(args),
        }
    }

    /// Free variables in order of first occurrence, row variables included.
    pub fn free_vars(&self) -> Vec<(String, VarSort)> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        free_in_formula(self, &mut bound, &mut out);
        out
    }
}

impl SumoTerm {
    pub fn free_vars(&self) -> Vec<(String, VarSort)> {
        let mut out = Vec::new();
        free_in_term(self, &mut Vec::new(), &mut out);
        out
    }
}

fn note(name: &str, sort: VarSort, bound: &[String], out: &mut Vec<(String, VarSort)>) {
    if !bound.iter().any(|b| b == name) && !out.iter().any(|(n, _)| n == name) {
        out.push((name.to_string(), sort));
    }
}

fn free_in_spine(s: &SumoSpine, bound: &mut Vec<String>, out: &mut Vec<(String, VarSort)>) {
    match s {
        SumoSpine::Terms(items) => items.iter().for_each(|t| free_in_term(t, bound, out)),
        SumoSpine::RowTail {
            prefix,
            row,
            suffix,
        } => {
            prefix.iter().for_each(|t| free_in_term(t, bound, out));
            note(row, VarSort::Row, bound, out);
            suffix.iter().for_each(|t| free_in_term(t, bound, out));
        }
    }
}

fn free_in_head(h: &Head, bound: &[String], out: &mut Vec<(String, VarSort)>) {
    if let Head::Var(v) = h {
        note(v, VarSort::Individual, bound, out);
    }
}

fn free_in_term(t: &SumoTerm, bound: &mut Vec<String>, out: &mut Vec<(String, VarSort)>) {
    match t {
        SumoTerm::Var(v) => note(v, VarSort::Individual, bound, out),
        SumoTerm::Const(_) | SumoTerm::Rat(_) | SumoTerm::Builtin(_) => {}
        SumoTerm::Apply { head, spine } => {
            free_in_head(head, bound, out);
            free_in_spine(spine, bound, out);
        }
        SumoTerm::Kappa { var, body } => {
            bound.push(var.clone());
            free_in_formula(body, bound, out);
            bound.pop();
        }
        SumoTerm::Arith { left, right, .. } => {
            free_in_term(left, bound, out);
            free_in_term(right, bound, out);
        }
        SumoTerm::Embed(f) => free_in_formula(f, bound, out),
    }
}

fn free_in_formula(f: &SumoFormula, bound: &mut Vec<String>, out: &mut Vec<(String, VarSort)>) {
    use SumoFormula::*;
    match f {
        Bot | Top => {}
        Not(g) => free_in_formula(g, bound, out),
        Impl(a, b) | Iff(a, b) => {
            free_in_formula(a, bound, out);
            free_in_formula(b, bound, out);
        }
        And(items) | Or(items) => items.iter().for_each(|g| free_in_formula(g, bound, out)),
        ForallVars(names, body) | ExistsVars(names, body) => {
            let n = bound.len();
            bound.extend(names.iter().cloned());
            free_in_formula(body, bound, out);
            bound.truncate(n);
        }
        ForallRow(name, body) | ExistsRow(name, body) => {
            bound.push(name.clone());
            free_in_formula(body, bound, out);
            bound.pop();
        }
        Eq(a, b) | Instance(a, b) | Subclass(a, b) | Le(a, b) | Lt(a, b) => {
            free_in_term(a, bound, out);
            free_in_term(b, bound, out);
        }
        Atom { head, spine } => {
            free_in_head(head, bound, out);
            free_in_spine(spine, bound, out);
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Var(v) => write!(f, "?{v}"),
            Head::Const(c) => f.write_str(c),
        }
    }
}

impl fmt::Display for SumoSpine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumoSpine::Terms(items) => items.iter().try_for_each(|t| write!(f, " {t}")),
            SumoSpine::RowTail {
                prefix,
                row,
                suffix,
            } => {
                prefix.iter().try_for_each(|t| write!(f, " {t}"))?;
                write!(f, " @{row}")?;
                suffix.iter().try_for_each(|t| write!(f, " {t}"))
            }
        }
    }
}

impl fmt::Display for SumoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumoTerm::Var(v) => write!(f, "?{v}"),
            SumoTerm::Const(c) => f.write_str(c),
            SumoTerm::Rat(q) => write!(f, "{q}"),
            SumoTerm::Apply { head, spine } => write!(f, "({head}{spine})"),
            SumoTerm::Kappa { var, body } => write!(f, "(KappaFn ?{var} {body})"),
            SumoTerm::Arith { op, left, right } => {
                write!(f, "({} {left} {right})", op.kif_name())
            }
            SumoTerm::Builtin(b) => f.write_str(b.kif_name()),
            SumoTerm::Embed(g) => write!(f, "{g}"),
        }
    }
}

fn binder_list(f: &mut fmt::Formatter<'_>, names: &[String], sigil: char) -> fmt::Result {
    f.write_str("(")?;
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{sigil}{n}")?;
    }
    f.write_str(")")
}

/// Renders the formula as SUO-KIF text that lowers back to the same tree.
impl fmt::Display for SumoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SumoFormula::*;
        match self {
            Bot => f.write_str("False"),
            Top => f.write_str("True"),
            Not(g) => write!(f, "(not {g})"),
            Impl(a, b) => write!(f, "(=> {a} {b})"),
            Iff(a, b) => write!(f, "(<=> {a} {b})"),
            And(items) | Or(items) => {
                f.write_str(if matches!(self, And(_)) { "(and" } else { "(or" })?;
                items.iter().try_for_each(|g| write!(f, " {g}"))?;
                f.write_str(")")
            }
            ForallVars(names, body) | ExistsVars(names, body) => {
                let q = if matches!(self, ForallVars(..)) { "forall" } else { "exists" };
                write!(f, "({q} ")?;
                binder_list(f, names, '?')?;
                write!(f, " {body})")
            }
            ForallRow(name, body) | ExistsRow(name, body) => {
                let q = if matches!(self, ForallRow(..)) { "forall" } else { "exists" };
                write!(f, "({q} ")?;
                binder_list(f, std::slice::from_ref(name), '@')?;
                write!(f, " {body})")
            }
            Eq(a, b) => write!(f, "(equal {a} {b})"),
            Instance(a, b) => write!(f, "(instance {a} {b})"),
            Subclass(a, b) => write!(f, "(subclass {a} {b})"),
            Le(a, b) => write!(f, "(lessThanOrEqualTo {a} {b})"),
            Lt(a, b) => write!(f, "(lessThan {a} {b})"),
            Atom { head, spine } => write!(f, "({head}{spine})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_normalizes_and_prints() {
        assert_eq!(Rat::new(-350, 2), Rat { numerator: -35, scale: 1 });
        assert_eq!(Rat::new(0, 3), Rat::integer(0));
        assert_eq!(Rat::new(112, 1).to_string(), "11.2");
        assert_eq!(Rat::new(-5, 3).to_string(), "-0.005");
        assert_eq!(Rat::integer(12).to_string(), "12");
    }

    #[test]
    fn free_vars_in_first_occurrence_order() {
        let f = SumoFormula::Impl(
            Box::new(SumoFormula::Atom {
                head: Head::Var("R1".into()),
                spine: SumoSpine::RowTail {
                    prefix: vec![SumoTerm::Var("X".into())],
                    row: "ROW".into(),
                    suffix: vec![],
                },
            }),
            Box::new(SumoFormula::ExistsVars(
                vec!["X".into(), "Y".into()],
                Box::new(SumoFormula::Eq(
                    SumoTerm::Var("Y".into()),
                    SumoTerm::Var("Z".into()),
                )),
            )),
        );
        assert_eq!(
            f.free_vars(),
            vec![
                ("R1".to_string(), VarSort::Individual),
                ("X".to_string(), VarSort::Individual),
                ("ROW".to_string(), VarSort::Row),
                ("Z".to_string(), VarSort::Individual),
            ]
        );
    }
}
