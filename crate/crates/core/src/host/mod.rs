//! Simply typed higher-order set theory terms.

pub mod catalog;
pub mod numeral;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use catalog::{background, Origin, Premise};
pub use numeral::{encode_rational, mk_list, numeral};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HostType {
    Iota,
    Omicron,
    Arrow(Box<HostType>, Box<HostType>),
}

impl HostType {
    pub fn arrow(from: HostType, to: HostType) -> Self {
        HostType::Arrow(Box::new(from), Box::new(to))
    }

    /// `ι→ι`, the type of spines.
    pub fn list() -> Self {
        Self::arrow(HostType::Iota, HostType::Iota)
    }

    /// Builds `a₁→…→aₙ→r`.
    pub fn curried(args: &[HostType], result: HostType) -> Self {
        args.iter()
            .rev()
            .fold(result, |acc, a| Self::arrow(a.clone(), acc))
    }
}

impl fmt::Display for HostType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostType::Iota => f.write_str("$i"),
            HostType::Omicron => f.write_str("$o"),
            HostType::Arrow(a, b) => match **a {
                HostType::Arrow(..) => write!(f, "({a})>{b}"),
                _ => write!(f, "{a}>{b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HostTerm {
    Var(String, HostType),
    Const(String, HostType),
    App(Box<HostTerm>, Box<HostTerm>),
    Lam(String, HostType, Box<HostTerm>),
    Bot,
    Top,
    Not(Box<HostTerm>),
    Imp(Box<HostTerm>, Box<HostTerm>),
    And(Box<HostTerm>, Box<HostTerm>),
    Or(Box<HostTerm>, Box<HostTerm>),
    Iff(Box<HostTerm>, Box<HostTerm>),
    Eq(HostType, Box<HostTerm>, Box<HostTerm>),
    All(String, HostType, Box<HostTerm>),
    Ex(String, HostType, Box<HostTerm>),
    Mem(Box<HostTerm>, Box<HostTerm>),
    Subq(Box<HostTerm>, Box<HostTerm>),
    /// `{x ∈ A | φ}`
    Sep(String, Box<HostTerm>, Box<HostTerm>),
    If(Box<HostTerm>, Box<HostTerm>, Box<HostTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HostError {
    #[error("type mismatch in {subterm}: expected {expected}, found {found}")]
    TypeMismatch {
        subterm: String,
        expected: String,
        found: String,
    },
}

fn mismatch(t: &HostTerm, expected: impl fmt::Display, found: impl fmt::Display) -> HostError {
    HostError::TypeMismatch {
        subterm: t.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

// Builders. Catalog constants are looked up by name and panic if absent,
// since every call site names a fixed catalog entry.

pub fn cst(name: &str) -> HostTerm {
    let ty = catalog::type_of(name).unwrap_or_else(|| panic!("not a catalog constant: {name}"));
    HostTerm::Const(name.to_string(), ty)
}

pub fn iota_const(name: &str) -> HostTerm {
    HostTerm::Const(name.to_string(), HostType::Iota)
}

pub fn var(name: &str, ty: HostType) -> HostTerm {
    HostTerm::Var(name.to_string(), ty)
}

pub fn ivar(name: &str) -> HostTerm {
    var(name, HostType::Iota)
}

pub fn app(f: HostTerm, a: HostTerm) -> HostTerm {
    HostTerm::App(Box::new(f), Box::new(a))
}

pub fn apps(f: HostTerm, args: impl IntoIterator<Item = HostTerm>) -> HostTerm {
    args.into_iter().fold(f, app)
}

/// Applies a catalog constant to arguments.
pub fn call(name: &str, args: impl IntoIterator<Item = HostTerm>) -> HostTerm {
    apps(cst(name), args)
}

pub fn lam(x: &str, ty: HostType, body: HostTerm) -> HostTerm {
    HostTerm::Lam(x.to_string(), ty, Box::new(body))
}

pub fn not(a: HostTerm) -> HostTerm {
    HostTerm::Not(Box::new(a))
}

pub fn imp(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Imp(Box::new(a), Box::new(b))
}

pub fn and(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::And(Box::new(a), Box::new(b))
}

pub fn or(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Or(Box::new(a), Box::new(b))
}

pub fn iff(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Iff(Box::new(a), Box::new(b))
}

pub fn eq(ty: HostType, a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Eq(ty, Box::new(a), Box::new(b))
}

pub fn eq_i(a: HostTerm, b: HostTerm) -> HostTerm {
    eq(HostType::Iota, a, b)
}

pub fn all(x: &str, ty: HostType, body: HostTerm) -> HostTerm {
    HostTerm::All(x.to_string(), ty, Box::new(body))
}

pub fn ex(x: &str, ty: HostType, body: HostTerm) -> HostTerm {
    HostTerm::Ex(x.to_string(), ty, Box::new(body))
}

pub fn mem(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Mem(Box::new(a), Box::new(b))
}

pub fn subq(a: HostTerm, b: HostTerm) -> HostTerm {
    HostTerm::Subq(Box::new(a), Box::new(b))
}

pub fn sep(x: &str, set: HostTerm, body: HostTerm) -> HostTerm {
    HostTerm::Sep(x.to_string(), Box::new(set), Box::new(body))
}

pub fn ite(c: HostTerm, t: HostTerm, e: HostTerm) -> HostTerm {
    HostTerm::If(Box::new(c), Box::new(t), Box::new(e))
}

/// Right fold of binary conjunction; `Top` for no conjuncts.
pub fn conj(items: Vec<HostTerm>) -> HostTerm {
    let mut it = items.into_iter().rev();
    match it.next() {
        None => HostTerm::Top,
        Some(last) => it.fold(last, |acc, a| and(a, acc)),
    }
}

pub fn disj(items: Vec<HostTerm>) -> HostTerm {
    let mut it = items.into_iter().rev();
    match it.next() {
        None => HostTerm::Bot,
        Some(last) => it.fold(last, |acc, a| or(a, acc)),
    }
}

/// `a₁ → … → aₙ → body`
pub fn imp_chain(premises: Vec<HostTerm>, body: HostTerm) -> HostTerm {
    premises.into_iter().rev().fold(body, |acc, p| imp(p, acc))
}

pub fn all_many(vars: &[(String, HostType)], body: HostTerm) -> HostTerm {
    vars.iter()
        .rev()
        .fold(body, |acc, (x, ty)| all(x, ty.clone(), acc))
}

pub fn ex_many(vars: &[(String, HostType)], body: HostTerm) -> HostTerm {
    vars.iter()
        .rev()
        .fold(body, |acc, (x, ty)| ex(x, ty.clone(), acc))
}

/// The `P` coercion.
pub fn prop_of(x: HostTerm) -> HostTerm {
    call("prop_of", [x])
}

/// The `B` coercion.
pub fn bool_of(p: HostTerm) -> HostTerm {
    call("bool_of", [p])
}

/// `ap f (listset s)`
pub fn ap_list(f: HostTerm, spine: HostTerm) -> HostTerm {
    call("ap", [f, call("listset", [spine])])
}

impl HostTerm {
    pub fn typecheck(&self) -> Result<HostType, HostError> {
        typecheck_in(self, &mut Vec::new())
    }

    /// Free variables with their annotated types, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<(String, HostType)> {
        let mut out = Vec::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Names of every constant occurring in the term.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let HostTerm::Const(c, _) = t {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Constants plus the catalog symbols that `Mem`, `Subq` and `If` stand for.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            let name = match t {
                HostTerm::Const(c, _) => c.as_str(),
                HostTerm::Mem(..) => "in",
                HostTerm::Subq(..) => "subq",
                HostTerm::If(..) => "if_i",
                _ => return,
            };
            out.insert(name.to_string());
        });
        out
    }

    /// Preorder traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&HostTerm)) {
        f(self);
        use HostTerm::*;
        match self {
            Var(..) | Const(..) | Bot | Top => {}
            Not(a) | Lam(_, _, a) | All(_, _, a) | Ex(_, _, a) => a.visit(f),
            App(a, b) | Imp(a, b) | And(a, b) | Or(a, b) | Iff(a, b) | Eq(_, a, b) | Mem(a, b)
            | Subq(a, b) | Sep(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            If(a, b, c) => {
                a.visit(f);
                b.visit(f);
                c.visit(f);
            }
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &HostTerm) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// Capture-avoiding substitution of a free variable.
    pub fn subst(&self, x: &str, value: &HostTerm) -> HostTerm {
        let fv: BTreeSet<String> = value.free_vars().into_iter().map(|(n, _)| n).collect();
        subst_in(self, x, value, &fv)
    }

    /// Head and arguments of an application spine.
    pub fn unapply(&self) -> (&HostTerm, Vec<&HostTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        while let HostTerm::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }
}

fn typecheck_in(t: &HostTerm, env: &mut Vec<(String, HostType)>) -> Result<HostType, HostError> {
    use HostTerm::*;
    let expect = |u: &HostTerm, env: &mut Vec<(String, HostType)>, want: &HostType| {
        let got = typecheck_in(u, env)?;
        if &got == want {
            Ok(())
        } else {
            Err(mismatch(u, want, got))
        }
    };
    let o = HostType::Omicron;
    let i = HostType::Iota;
    match t {
        Var(x, ty) => match env.iter().rev().find(|(n, _)| n == x) {
            Some((_, bound)) if bound != ty => Err(mismatch(t, bound, ty)),
            _ => Ok(ty.clone()),
        },
        Const(_, ty) => Ok(ty.clone()),
        App(f, a) => match typecheck_in(f, env)? {
            HostType::Arrow(from, to) => {
                expect(a, env, &from)?;
                Ok(*to)
            }
            other => Err(mismatch(f, "a function type", other)),
        },
        Lam(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let b = typecheck_in(body, env);
            env.pop();
            Ok(HostType::arrow(ty.clone(), b?))
        }
        Bot | Top => Ok(o),
        Not(a) => {
            expect(a, env, &o)?;
            Ok(o)
        }
        Imp(a, b) | And(a, b) | Or(a, b) | Iff(a, b) => {
            expect(a, env, &o)?;
            expect(b, env, &o)?;
            Ok(o)
        }
        Eq(ty, a, b) => {
            expect(a, env, ty)?;
            expect(b, env, ty)?;
            Ok(o)
        }
        All(x, ty, body) | Ex(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let r = expect(body, env, &o);
            env.pop();
            r.map(|_| o)
        }
        Mem(a, b) | Subq(a, b) => {
            expect(a, env, &i)?;
            expect(b, env, &i)?;
            Ok(o)
        }
        Sep(x, set, body) => {
            expect(set, env, &i)?;
            env.push((x.clone(), i.clone()));
            let r = expect(body, env, &o);
            env.pop();
            r.map(|_| i)
        }
        If(c, a, b) => {
            expect(c, env, &o)?;
            expect(a, env, &i)?;
            expect(b, env, &i)?;
            Ok(i)
        }
    }
}

fn collect_free(t: &HostTerm, bound: &mut Vec<String>, out: &mut Vec<(String, HostType)>) {
    use HostTerm::*;
    match t {
        Var(x, ty) => {
            if !bound.contains(x) && !out.iter().any(|(n, _)| n == x) {
                out.push((x.clone(), ty.clone()));
            }
        }
        Const(..) | Bot | Top => {}
        Lam(x, _, body) | All(x, _, body) | Ex(x, _, body) => {
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Sep(x, set, body) => {
            collect_free(set, bound, out);
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Not(a) => collect_free(a, bound, out),
        App(a, b) | Imp(a, b) | And(a, b) | Or(a, b) | Iff(a, b) | Eq(_, a, b) | Mem(a, b)
        | Subq(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        If(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
    }
}

fn alpha(a: &HostTerm, b: &HostTerm, env: &mut Vec<(String, String)>) -> bool {
    use HostTerm::*;
    let under = |x: &str, y: &str, s: &HostTerm, t: &HostTerm, env: &mut Vec<(String, String)>| {
        env.push((x.to_string(), y.to_string()));
        let r = alpha(s, t, env);
        env.pop();
        r
    };
    match (a, b) {
        (Var(x, tx), Var(y, ty)) => {
            tx == ty
                && match env.iter().rev().find(|(l, r)| l == x || r == y) {
                    Some((l, r)) => l == x && r == y,
                    None => x == y,
                }
        }
        (Const(x, tx), Const(y, ty)) => x == y && tx == ty,
        (App(f, x), App(g, y))
        | (Imp(f, x), Imp(g, y))
        | (And(f, x), And(g, y))
        | (Or(f, x), Or(g, y))
        | (Iff(f, x), Iff(g, y))
        | (Mem(f, x), Mem(g, y))
        | (Subq(f, x), Subq(g, y)) => alpha(f, g, env) && alpha(x, y, env),
        (Eq(s, f, x), Eq(t, g, y)) => s == t && alpha(f, g, env) && alpha(x, y, env),
        (Bot, Bot) | (Top, Top) => true,
        (Not(x), Not(y)) => alpha(x, y, env),
        (Lam(x, s, p), Lam(y, t, q)) | (All(x, s, p), All(y, t, q)) | (Ex(x, s, p), Ex(y, t, q)) => {
            s == t && under(x, y, p, q, env)
        }
        (Sep(x, s, p), Sep(y, t, q)) => alpha(s, t, env) && under(x, y, p, q, env),
        (If(c, x, y), If(d, u, v)) => alpha(c, d, env) && alpha(x, u, env) && alpha(y, v, env),
        _ => false,
    }
}

fn fresh(base: &str, avoid: &BTreeSet<String>, body: &HostTerm) -> String {
    let used: BTreeSet<String> = body.free_vars().into_iter().map(|(n, _)| n).collect();
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !avoid.contains(n) && !used.contains(n))
        .expect("infinite supply")
}

fn subst_in(t: &HostTerm, x: &str, v: &HostTerm, fv: &BTreeSet<String>) -> HostTerm {
    use HostTerm::*;
    let go = |u: &HostTerm| Box::new(subst_in(u, x, v, fv));
    // Rebuilds a binder, renaming its variable when it would capture.
    let bind = |y: &String, ty: &HostType, body: &HostTerm| -> Option<(String, Box<HostTerm>)> {
        if y == x {
            return None;
        }
        if fv.contains(y) {
            let z = fresh(y, fv, body);
            let renamed = body.subst(y, &HostTerm::Var(z.clone(), ty.clone()));
            Some((z, Box::new(subst_in(&renamed, x, v, fv))))
        } else {
            Some((y.clone(), Box::new(subst_in(body, x, v, fv))))
        }
    };
    match t {
        Var(y, _) if y == x => v.clone(),
        Var(..) | Const(..) | Bot | Top => t.clone(),
        App(a, b) => App(go(a), go(b)),
        Not(a) => Not(go(a)),
        Imp(a, b) => Imp(go(a), go(b)),
        And(a, b) => And(go(a), go(b)),
        Or(a, b) => Or(go(a), go(b)),
        Iff(a, b) => Iff(go(a), go(b)),
        Eq(ty, a, b) => Eq(ty.clone(), go(a), go(b)),
        Mem(a, b) => Mem(go(a), go(b)),
        Subq(a, b) => Subq(go(a), go(b)),
        If(a, b, c) => If(go(a), go(b), go(c)),
        Lam(y, ty, body) => match bind(y, ty, body) {
            None => t.clone(),
            Some((z, b)) => Lam(z, ty.clone(), b),
        },
        All(y, ty, body) => match bind(y, ty, body) {
            None => t.clone(),
            Some((z, b)) => All(z, ty.clone(), b),
        },
        Ex(y, ty, body) => match bind(y, ty, body) {
            None => t.clone(),
            Some((z, b)) => Ex(z, ty.clone(), b),
        },
        Sep(y, set, body) => match bind(y, &HostType::Iota, body) {
            None => Sep(y.clone(), go(set), body.clone()),
            Some((z, b)) => Sep(z, go(set), b),
        },
    }
}

impl fmt::Display for HostTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::th0::term_text(self))
    }
}
