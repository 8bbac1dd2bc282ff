//! THF0 problem files: rendering, separation hoisting and document layout.

pub mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::host::catalog::{self, Origin};
use crate::host::{self, HostTerm, HostType};
use crate::names;
use crate::translate::Problem;

pub use parse::{check_syntax, inline_seps, parse_doc, ParseThfError, SyntaxError};

/// Lines longer than this are wrapped at spaces.
pub const WRAP_WIDTH: usize = 100;
const INDENT: &str = "    ";

pub fn type_text(ty: &HostType, base: Option<&str>) -> String {
    match ty {
        HostType::Iota => base.unwrap_or("$i").to_string(),
        HostType::Omicron => "$o".to_string(),
        HostType::Arrow(a, b) => {
            let left = type_text(a, base);
            let right = type_text(b, base);
            match **a {
                HostType::Arrow(..) => format!("({left})>{right}"),
                _ => format!("{left}>{right}"),
            }
        }
    }
}

/// Fully parenthesized THF text. A separation that has not been hoisted prints as
/// `(sep @ A @ (^[X:$i]: body))`.
pub fn term_text(t: &HostTerm) -> String {
    let mut out = String::new();
    write_term(t, None, &mut out);
    out
}

pub fn term_text_with(t: &HostTerm, base: Option<&str>) -> String {
    let mut out = String::new();
    write_term(t, base, &mut out);
    out
}

fn write_binder(
    t: &HostTerm,
    base: Option<&str>,
    out: &mut String,
    symbol: &str,
    peel: fn(&HostTerm) -> Option<(&String, &HostType, &HostTerm)>,
) {
    let mut vars = Vec::new();
    let mut body = t;
    while let Some((x, ty, b)) = peel(body) {
        vars.push(format!("{}:{}", names::var_name(x), type_text(ty, base)));
        body = b;
    }
    out.push('(');
    out.push_str(symbol);
    out.push('[');
    out.push_str(&vars.join(","));
    out.push_str("]: ");
    write_term(body, base, out);
    out.push(')');
}

fn write_infix(a: &HostTerm, op: &str, b: &HostTerm, base: Option<&str>, out: &mut String) {
    out.push('(');
    write_term(a, base, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_term(b, base, out);
    out.push(')');
}

fn write_apply(head: &str, args: &[&HostTerm], base: Option<&str>, out: &mut String) {
    out.push('(');
    out.push_str(head);
    for a in args {
        out.push_str(" @ ");
        write_term(a, base, out);
    }
    out.push(')');
}

fn write_term(t: &HostTerm, base: Option<&str>, out: &mut String) {
    use HostTerm::*;
    match t {
        Var(x, _) => out.push_str(&names::var_name(x)),
        Const(c, _) => out.push_str(c),
        Bot => out.push_str("$false"),
        Top => out.push_str("$true"),
        App(..) => {
            let (head, args) = t.unapply();
            let mut h = String::new();
            write_term(head, base, &mut h);
            write_apply(&h, &args, base, out);
        }
        Lam(..) => write_binder(t, base, out, "^", |u| match u {
            Lam(x, ty, b) => Some((x, ty, b)),
            _ => None,
        }),
        All(..) => write_binder(t, base, out, "!", |u| match u {
            All(x, ty, b) => Some((x, ty, b)),
            _ => None,
        }),
        Ex(..) => write_binder(t, base, out, "?", |u| match u {
            Ex(x, ty, b) => Some((x, ty, b)),
            _ => None,
        }),
        Not(a) => {
            out.push_str("(~ ");
            write_term(a, base, out);
            out.push(')');
        }
        Imp(a, b) => write_infix(a, "=>", b, base, out),
        And(a, b) => write_infix(a, "&", b, base, out),
        Or(a, b) => write_infix(a, "|", b, base, out),
        Iff(a, b) => write_infix(a, "<=>", b, base, out),
        Eq(_, a, b) => write_infix(a, "=", b, base, out),
        Mem(a, b) => write_apply("in", &[a, b], base, out),
        Subq(a, b) => write_apply("subq", &[a, b], base, out),
        If(c, a, b) => write_apply("if_i", &[c, a, b], base, out),
        Sep(x, set, body) => {
            let lam = host::lam(x, HostType::Iota, (**body).clone());
            write_apply("sep", &[set, &lam], base, out);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Type,
    Axiom,
    Definition,
    Conjecture,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Type => "type",
            Role::Axiom => "axiom",
            Role::Definition => "definition",
            Role::Conjecture => "conjecture",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "type" => Role::Type,
            "axiom" => Role::Axiom,
            "definition" => Role::Definition,
            "conjecture" => Role::Conjecture,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    /// Symbol declaration; `None` declares the base type itself as `$tType`.
    Type(String, Option<HostType>),
    Formula(HostTerm),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub name: String,
    pub role: Role,
    pub content: Content,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Th0Doc {
    /// Comment lines without the leading `% `.
    pub header: Vec<String>,
    pub records: Vec<Record>,
    /// Base type name used instead of `$i`, if any.
    pub base: Option<String>,
}

impl Th0Doc {
    pub fn conjecture(&self) -> Option<&Record> {
        self.records.iter().find(|r| r.role == Role::Conjecture)
    }

    pub fn formulas(&self) -> impl Iterator<Item = (&Record, &HostTerm)> {
        self.records.iter().filter_map(|r| match &r.content {
            Content::Formula(f) => Some((r, f)),
            Content::Type(..) => None,
        })
    }
}

fn wrap(line: &str) -> String {
    if line.len() <= WRAP_WIDTH {
        return line.to_string();
    }
    let mut out = String::new();
    let mut current = String::new();
    for word in line.split(' ') {
        if !current.is_empty() && current.len() + 1 + word.len() > WRAP_WIDTH {
            out.push_str(&current);
            out.push('\n');
            current = format!("{INDENT}{word}");
        } else {
            if !current.is_empty() {
                current.push(' ');
            }
            current.push_str(word);
        }
    }
    out.push_str(&current);
    out
}

impl Record {
    pub fn render(&self, base: Option<&str>) -> String {
        let body = match &self.content {
            Content::Type(sym, Some(ty)) => format!("{sym}: {}", type_text(ty, base)),
            Content::Type(sym, None) => format!("{sym}: $tType"),
            Content::Formula(f) => term_text_with(f, base),
        };
        wrap(&format!("thf({},{},{}).", self.name, self.role.as_str(), body))
    }
}

impl fmt::Display for Th0Doc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.header {
            writeln!(f, "% {h}")?;
        }
        if !self.header.is_empty() {
            writeln!(f)?;
        }
        for r in &self.records {
            writeln!(f, "{}", r.render(self.base.as_deref()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    pub version: String,
    /// Omitted in reproducible mode.
    pub date: Option<String>,
    pub sources: Vec<String>,
    /// Declare and use a named base type instead of `$i`.
    pub base: Option<String>,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            version: env!("CARGO_PKG_VERSION").to_string(),
            date: None,
            sources: Vec::new(),
            base: None,
        }
    }
}

/// A hoisted separation: `sym fv = {x ∈ set | body}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepDef {
    pub sym: String,
    pub params: Vec<(String, HostType)>,
    pub x: String,
    pub set: HostTerm,
    pub body: HostTerm,
}

impl SepDef {
    pub fn ty(&self) -> HostType {
        let args: Vec<HostType> = self.params.iter().map(|(_, t)| t.clone()).collect();
        HostType::curried(&args, HostType::Iota)
    }

    pub fn applied(&self) -> HostTerm {
        host::apps(
            HostTerm::Const(self.sym.clone(), self.ty()),
            self.params.iter().map(|(n, t)| host::var(n, t.clone())),
        )
    }

    /// `∀fv ∀x. x ∈ sym fv ⇔ x ∈ set ∧ body`
    pub fn definition(&self) -> HostTerm {
        let x = host::ivar(&self.x);
        let inner = host::all(
            &self.x,
            HostType::Iota,
            host::iff(
                host::mem(x.clone(), self.applied()),
                host::and(host::mem(x, self.set.clone()), self.body.clone()),
            ),
        );
        host::all_many(&self.params, inner)
    }
}

#[derive(Default)]
struct Hoister {
    defs: BTreeMap<String, SepDef>,
    order: Vec<String>,
}

impl Hoister {
    /// Replaces every separation bottom-up; returns the symbols first introduced here.
    fn hoist(&mut self, t: &HostTerm) -> (HostTerm, Vec<String>) {
        let mut fresh = Vec::new();
        let out = self.walk(t, &mut fresh);
        (out, fresh)
    }

    fn walk(&mut self, t: &HostTerm, fresh: &mut Vec<String>) -> HostTerm {
        use HostTerm::*;
        let mut go = |u: &HostTerm| Box::new(self.walk(u, fresh));
        match t {
            Var(..) | Const(..) | Bot | Top => t.clone(),
            App(a, b) => App(go(a), go(b)),
            Lam(x, ty, b) => Lam(x.clone(), ty.clone(), go(b)),
            All(x, ty, b) => All(x.clone(), ty.clone(), go(b)),
            Ex(x, ty, b) => Ex(x.clone(), ty.clone(), go(b)),
            Not(a) => Not(go(a)),
            Imp(a, b) => Imp(go(a), go(b)),
            And(a, b) => And(go(a), go(b)),
            Or(a, b) => Or(go(a), go(b)),
            Iff(a, b) => Iff(go(a), go(b)),
            Eq(ty, a, b) => Eq(ty.clone(), go(a), go(b)),
            Mem(a, b) => Mem(go(a), go(b)),
            Subq(a, b) => Subq(go(a), go(b)),
            If(a, b, c) => If(go(a), go(b), go(c)),
            Sep(x, set, body) => {
                let set = self.walk(set, fresh);
                let body = self.walk(body, fresh);
                self.define(x, set, body, fresh)
            }
        }
    }

    fn define(&mut self, x: &str, set: HostTerm, body: HostTerm, fresh: &mut Vec<String>) -> HostTerm {
        let whole = host::sep(x, set.clone(), body.clone());
        let params = whole.free_vars();
        // The bound name must not clash with a parameter once `set` moves under it.
        let (x, body) = if params.iter().any(|(n, _)| n == x) {
            let taken: BTreeSet<String> = params.iter().map(|(n, _)| n.clone()).collect();
            let y = (1..)
                .map(|k| format!("{x}{k}"))
                .find(|n| !taken.contains(n))
                .expect("fresh name");
            let b = body.subst(x, &host::ivar(&y));
            (y, b)
        } else {
            (x.to_string(), body)
        };
        let key = term_text(&host::sep(&x, set.clone(), body.clone()));
        let key = params.iter().fold(key, |k, (n, ty)| format!("{k}|{n}:{ty}"));
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
        let sym = format!("sep_{hex}");
        if !self.defs.contains_key(&sym) {
            self.defs.insert(
                sym.clone(),
                SepDef {
                    sym: sym.clone(),
                    params,
                    x,
                    set,
                    body,
                },
            );
            self.order.push(sym.clone());
            fresh.push(sym.clone());
        }
        self.defs[&sym].applied()
    }
}

fn push_new(order: &mut Vec<String>, seen: &mut BTreeSet<String>, t: &HostTerm) {
    let mut found = Vec::new();
    t.visit(&mut |u| {
        if let HostTerm::Const(c, _) = u {
            found.push(c.clone());
        }
    });
    for c in found {
        if seen.insert(c.clone()) {
            order.push(c);
        }
    }
}

/// Lays out a problem as a THF document.
pub fn emit(problem: &Problem, opts: &EmitOptions) -> Th0Doc {
    let mut hoister = Hoister::default();
    let mut formulas: Vec<Record> = Vec::new();
    let mut hoisted: Vec<(Origin, HostTerm)> = Vec::new();
    let mut add = |name: &str, role: Role, t: &HostTerm, origin: Origin, formulas: &mut Vec<Record>| {
        let (t, fresh) = hoister.hoist(t);
        for sym in fresh {
            let d = &hoister.defs[&sym];
            formulas.push(Record {
                name: format!("def_{sym}"),
                role: Role::Definition,
                content: Content::Formula(d.definition()),
            });
        }
        hoisted.push((origin, t.clone()));
        formulas.push(Record {
            name: name.to_string(),
            role,
            content: Content::Formula(t),
        });
    };
    for p in &problem.premises {
        let role = if p.definition { Role::Definition } else { Role::Axiom };
        add(&p.name, role, &p.formula, p.origin, &mut formulas);
    }
    add("conj", Role::Conjecture, &problem.conjecture, Origin::Local, &mut formulas);

    // Declarations: catalog symbols in catalog order, then the rest by first use,
    // relation facts before knowledge base before local premises and conjecture.
    let mut seen = BTreeSet::new();
    let mut all_consts = Vec::new();
    let mut sep_bodies: Vec<HostTerm> = Vec::new();
    for sym in &hoister.order {
        let d = &hoister.defs[sym];
        sep_bodies.push(d.set.clone());
        sep_bodies.push(d.body.clone());
    }
    for (_, t) in &hoisted {
        push_new(&mut all_consts, &mut seen, t);
    }
    for t in &sep_bodies {
        push_new(&mut all_consts, &mut seen, t);
    }
    let mut symbols: BTreeSet<String> = all_consts.iter().cloned().collect();
    for (_, t) in &hoisted {
        symbols.extend(t.symbols());
    }
    for t in &sep_bodies {
        symbols.extend(t.symbols());
    }
    let mut order: Vec<String> = catalog::entries()
        .iter()
        .filter(|e| symbols.contains(e.name))
        .map(|e| e.name.to_string())
        .collect();
    let mut by_origin: Vec<String> = Vec::new();
    let mut placed: BTreeSet<String> = BTreeSet::new();
    for origin in [Origin::RelationFact, Origin::Kb, Origin::Local] {
        for (o, t) in &hoisted {
            if *o == origin {
                push_new(&mut by_origin, &mut placed, t);
            }
        }
    }
    for t in &sep_bodies {
        push_new(&mut by_origin, &mut placed, t);
    }
    order.extend(
        by_origin
            .into_iter()
            .filter(|c| !catalog::is_catalog_name(c) && !hoister.defs.contains_key(c)),
    );
    order.extend(hoister.order.iter().cloned());

    let type_of = |c: &str| -> HostType {
        if let Some(ty) = catalog::type_of(c) {
            return ty;
        }
        if let Some(d) = hoister.defs.get(c) {
            return d.ty();
        }
        HostType::Iota
    };

    let mut records = Vec::new();
    if let Some(b) = &opts.base {
        records.push(Record {
            name: format!("ty_{b}"),
            role: Role::Type,
            content: Content::Type(b.clone(), None),
        });
    }
    for c in &order {
        records.push(Record {
            name: format!("ty_{c}"),
            role: Role::Type,
            content: Content::Type(c.clone(), Some(type_of(c))),
        });
    }
    records.extend(formulas);

    let mut header = vec![
        format!("Problem: {}", problem.label),
        format!("Generator: sumok2set {}", opts.version),
    ];
    if let Some(d) = &opts.date {
        header.push(format!("Date: {d}"));
    }
    header.extend(opts.sources.iter().map(|s| format!("Source: {s}")));
    header.extend(problem.notes.iter().map(|n| format!("Note: {n}")));
    Th0Doc {
        header,
        records,
        base: opts.base.clone(),
    }
}

pub fn render(problem: &Problem, opts: &EmitOptions) -> String {
    emit(problem, opts).to_string()
}
