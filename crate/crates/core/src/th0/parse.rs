//! Reader for the THF0 subset this crate writes.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Content, Record, Role, SepDef, Th0Doc};
use crate::host::{self, catalog, HostTerm, HostType};
use crate::names;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseThfError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub type SyntaxError = ParseThfError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    At,
    And,
    Or,
    Imp,
    Iff,
    Not,
    Eq,
    Gt,
    Forall,
    Exists,
    Lambda,
    Dollar(String),
    Word(String),
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(src: &str) -> Result<Lexed, (usize, String)> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let word = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && (bytes[*i].is_ascii_alphanumeric() || bytes[*i] == b'_') {
                *i += 1;
            }
            src[s..*i].to_string()
        };
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b':' => Tok::Colon,
            b'@' => Tok::At,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'~' => Tok::Not,
            b'>' => Tok::Gt,
            b'!' => Tok::Forall,
            b'?' => Tok::Exists,
            b'^' => Tok::Lambda,
            b'=' if src[i..].starts_with("=>") => {
                i += 1;
                Tok::Imp
            }
            b'=' => Tok::Eq,
            b'<' if src[i..].starts_with("<=>") => {
                i += 2;
                Tok::Iff
            }
            b'$' => {
                i += 1;
                let w = word(&mut i);
                if w.is_empty() {
                    return Err((start, "expected a name after $".into()));
                }
                toks.push((Tok::Dollar(w), start));
                continue;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let w = word(&mut i);
                toks.push((Tok::Word(w), start));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err((start, format!("unexpected character {ch:?}")));
            }
        };
        i += 1;
        toks.push((tok, start));
    }
    Ok(Lexed {
        toks,
        end: src.len(),
    })
}

type Resolve<'r> = &'r dyn Fn(&str) -> Option<HostType>;

struct Parser<'s, 'r> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    env: Vec<(String, HostType)>,
    resolve: Resolve<'r>,
    base: Option<&'s str>,
}

type PResult<T> = Result<T, (usize, String)>;

impl Parser<'_, '_> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err((self.offset(), msg.into()))
    }

    fn next(&mut self) -> PResult<Tok> {
        match self.toks.get(self.pos) {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        let at = self.offset();
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err((at, format!("expected {want:?}, found {got:?}")))
        }
    }

    fn word(&mut self) -> PResult<String> {
        let at = self.offset();
        match self.next()? {
            Tok::Word(w) => Ok(w),
            other => Err((at, format!("expected a name, found {other:?}"))),
        }
    }

    fn ty_atom(&mut self) -> PResult<HostType> {
        let at = self.offset();
        match self.next()? {
            Tok::Dollar(d) if d == "i" => Ok(HostType::Iota),
            Tok::Dollar(d) if d == "o" => Ok(HostType::Omicron),
            Tok::Word(w) if Some(w.as_str()) == self.base => Ok(HostType::Iota),
            Tok::LParen => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err((at, format!("expected a type, found {other:?}"))),
        }
    }

    fn ty(&mut self) -> PResult<HostType> {
        let a = self.ty_atom()?;
        if self.peek() == Some(&Tok::Gt) {
            self.pos += 1;
            Ok(HostType::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn expr(&mut self) -> PResult<HostTerm> {
        let a = self.binary(0)?;
        Ok(a)
    }

    fn binary(&mut self, level: u8) -> PResult<HostTerm> {
        if level == 5 {
            return self.application();
        }
        let op = match level {
            0 => Tok::Iff,
            1 => Tok::Imp,
            2 => Tok::Or,
            3 => Tok::And,
            _ => Tok::Eq,
        };
        let mut left = self.binary(level + 1)?;
        while self.peek() == Some(&op) {
            let at = self.offset();
            self.pos += 1;
            // Implication groups to the right.
            let right = if level == 1 { self.binary(level)? } else { self.binary(level + 1)? };
            left = match level {
                0 => host::iff(left, right),
                1 => host::imp(left, right),
                2 => host::or(left, right),
                3 => host::and(left, right),
                _ => {
                    let ty = left.typecheck().map_err(|e| (at, e.to_string()))?;
                    host::eq(ty, left, right)
                }
            };
            if level == 1 {
                break;
            }
        }
        Ok(left)
    }

    fn application(&mut self) -> PResult<HostTerm> {
        let head = self.unary()?;
        let mut args = Vec::new();
        while self.peek() == Some(&Tok::At) {
            self.pos += 1;
            args.push(self.unary()?);
        }
        Ok(build_app(head, args))
    }

    fn unary(&mut self) -> PResult<HostTerm> {
        let at = self.offset();
        match self.next()? {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Not => Ok(host::not(self.unary()?)),
            Tok::Dollar(d) if d == "true" => Ok(HostTerm::Top),
            Tok::Dollar(d) if d == "false" => Ok(HostTerm::Bot),
            b @ (Tok::Forall | Tok::Exists | Tok::Lambda) => {
                self.expect(Tok::LBrack)?;
                let mut vars = Vec::new();
                loop {
                    let vat = self.offset();
                    let v = self.word()?;
                    let name = names::host_var(&v).ok_or((vat, format!("not a variable: {v}")))?;
                    self.expect(Tok::Colon)?;
                    vars.push((name, self.ty()?));
                    match self.next()? {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        other => return Err((self.offset(), format!("expected , or ], found {other:?}"))),
                    }
                }
                self.expect(Tok::Colon)?;
                let depth = self.env.len();
                self.env.extend(vars.iter().cloned());
                let body = self.unary();
                self.env.truncate(depth);
                let body = body?;
                Ok(vars.iter().rev().fold(body, |acc, (x, ty)| match b {
                    Tok::Forall => host::all(x, ty.clone(), acc),
                    Tok::Exists => host::ex(x, ty.clone(), acc),
                    _ => host::lam(x, ty.clone(), acc),
                }))
            }
            Tok::Word(w) => {
                if w.starts_with(|c: char| c.is_ascii_uppercase()) {
                    let name = names::host_var(&w).ok_or((at, format!("not a variable: {w}")))?;
                    match self.env.iter().rev().find(|(n, _)| *n == name) {
                        Some((_, ty)) => Ok(host::var(&name, ty.clone())),
                        None => Err((at, format!("unbound variable {w}"))),
                    }
                } else if matches!(w.as_str(), "in" | "subq" | "if_i" | "sep") {
                    let ty = (self.resolve)(&w).or_else(|| catalog::type_of(&w)).unwrap_or(HostType::Iota);
                    Ok(HostTerm::Const(w, ty))
                } else {
                    match (self.resolve)(&w) {
                        Some(ty) => Ok(HostTerm::Const(w, ty)),
                        None => Err((at, format!("undeclared symbol {w}"))),
                    }
                }
            }
            other => Err((at, format!("unexpected {other:?}"))),
        }
    }
}

/// Applications of the membership, inclusion, conditional and separation symbols
/// become their dedicated term forms.
fn build_app(head: HostTerm, args: Vec<HostTerm>) -> HostTerm {
    if let HostTerm::Const(c, _) = &head {
        match (c.as_str(), args.len()) {
            ("in", 2) | ("subq", 2) => {
                let mut it = args.into_iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                return if c == "in" { host::mem(a, b) } else { host::subq(a, b) };
            }
            ("if_i", 3) => {
                let mut it = args.into_iter();
                let (p, a, b) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                return host::ite(p, a, b);
            }
            ("sep", 2) if matches!(args[1], HostTerm::Lam(_, HostType::Iota, _)) => {
                let mut it = args.into_iter();
                let set = it.next().unwrap();
                if let Some(HostTerm::Lam(x, _, body)) = it.next() {
                    return host::sep(&x, set, *body);
                }
                unreachable!()
            }
            _ => {}
        }
    }
    host::apps(head, args)
}

fn line_col(src: &str, offset: usize, first_line: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = first_line + before.matches('\n').count();
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

/// Parses one term, resolving constants against the catalog.
pub fn parse_term(text: &str) -> Result<HostTerm, ParseThfError> {
    let resolve = |c: &str| catalog::type_of(c);
    parse_term_with(text, &resolve)
}

pub fn parse_term_with(text: &str, resolve: Resolve<'_>) -> Result<HostTerm, ParseThfError> {
    let to_err = |(off, msg): (usize, String)| {
        let (line, col) = line_col(text, off, 1);
        ParseThfError { line, col, msg }
    };
    let lexed = lex(text).map_err(to_err)?;
    let mut p = Parser {
        toks: lexed.toks,
        pos: 0,
        end: lexed.end,
        env: Vec::new(),
        resolve,
        base: None,
    };
    let t = p.expr().map_err(to_err)?;
    if p.pos < p.toks.len() {
        return Err(to_err((p.offset(), "trailing input".into())));
    }
    Ok(t)
}

fn valid_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits at lines opening a record; returns header comments and (first line, text) chunks.
fn split(text: &str) -> (Vec<String>, Vec<(usize, String)>) {
    let mut header = Vec::new();
    let mut chunks: Vec<(usize, String)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.starts_with("thf(") {
            chunks.push((k + 1, String::new()));
        }
        match chunks.last_mut() {
            Some((_, buf)) => {
                buf.push_str(line);
                buf.push('\n');
            }
            None => {
                if let Some(rest) = line.strip_prefix('%') {
                    header.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                } else if !line.trim().is_empty() {
                    chunks.push((k + 1, format!("{line}\n")));
                }
            }
        }
    }
    (header, chunks)
}

struct DocState {
    types: BTreeMap<String, HostType>,
    base: Option<String>,
}

fn parse_record(chunk: &str, first_line: usize, st: &mut DocState) -> Result<Record, ParseThfError> {
    let to_err = |(off, msg): (usize, String)| {
        let (line, col) = line_col(chunk, off, first_line);
        ParseThfError { line, col, msg }
    };
    let lexed = lex(chunk).map_err(to_err)?;
    let types = st.types.clone();
    let resolve = move |c: &str| types.get(c).cloned();
    let mut p = Parser {
        toks: lexed.toks,
        pos: 0,
        end: lexed.end,
        env: Vec::new(),
        resolve: &resolve,
        base: st.base.as_deref(),
    };
    let record = (|| -> PResult<Record> {
        match p.word()?.as_str() {
            "thf" => {}
            other => return Err((0, format!("expected thf, found {other}"))),
        }
        p.expect(Tok::LParen)?;
        let at = p.offset();
        let name = p.word()?;
        if !valid_name(&name) {
            return Err((at, format!("invalid record name {name}")));
        }
        p.expect(Tok::Comma)?;
        let at = p.offset();
        let role_name = p.word()?;
        let role = Role::from_name(&role_name).ok_or((at, format!("unknown role {role_name}")))?;
        p.expect(Tok::Comma)?;
        let content = if role == Role::Type {
            let at = p.offset();
            let sym = p.word()?;
            if !valid_name(&sym) {
                return Err((at, format!("invalid symbol name {sym}")));
            }
            p.expect(Tok::Colon)?;
            if p.peek() == Some(&Tok::Dollar("tType".into())) {
                p.pos += 1;
                Content::Type(sym, None)
            } else {
                Content::Type(sym, Some(p.ty()?))
            }
        } else {
            let at = p.offset();
            let f = p.expr()?;
            match f.typecheck() {
                Ok(HostType::Omicron) => {}
                Ok(other) => return Err((at, format!("formula has type {other}"))),
                Err(e) => return Err((at, e.to_string())),
            }
            Content::Formula(f)
        };
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
        if p.pos < p.toks.len() {
            return Err((p.offset(), "trailing input after record".into()));
        }
        Ok(Record { name, role, content })
    })()
    .map_err(to_err)?;
    match &record.content {
        Content::Type(sym, None) => st.base = Some(sym.clone()),
        Content::Type(sym, Some(ty)) => {
            st.types.insert(sym.clone(), ty.clone());
        }
        Content::Formula(_) => {}
    }
    Ok(record)
}

/// Parses a document; the first error aborts.
pub fn parse_doc(text: &str) -> Result<Th0Doc, ParseThfError> {
    let (header, chunks) = split(text);
    let mut st = DocState {
        types: BTreeMap::new(),
        base: None,
    };
    let mut records = Vec::new();
    for (line, chunk) in &chunks {
        records.push(parse_record(chunk, *line, &mut st)?);
    }
    Ok(Th0Doc {
        header,
        records,
        base: st.base,
    })
}

/// Every problem found in the text: per-record parse errors, undeclared symbols,
/// duplicate names and a conjecture count other than one.
pub fn check_syntax(text: &str) -> Vec<SyntaxError> {
    let (_, chunks) = split(text);
    let mut st = DocState {
        types: BTreeMap::new(),
        base: None,
    };
    let mut errors = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut conjectures = 0;
    let mut failed = false;
    for (line, chunk) in &chunks {
        match parse_record(chunk, *line, &mut st) {
            Ok(r) => {
                if r.role == Role::Conjecture {
                    conjectures += 1;
                }
                if let Some(prev) = seen.insert(r.name.clone(), *line) {
                    errors.push(SyntaxError {
                        line: *line,
                        col: 1,
                        msg: format!("record name {} already used on line {prev}", r.name),
                    });
                }
            }
            Err(e) => {
                failed = true;
                errors.push(e);
            }
        }
    }
    // A record that failed to parse may have been the conjecture.
    if conjectures > 1 || (conjectures == 0 && !failed) {
        let line = text.lines().count().max(1);
        errors.push(SyntaxError {
            line,
            col: 1,
            msg: format!("expected exactly one conjecture, found {conjectures}"),
        });
    }
    errors
}

fn read_sep_def(f: &HostTerm) -> Option<SepDef> {
    let mut params = Vec::new();
    let mut t = f;
    while let HostTerm::All(x, ty, body) = t {
        params.push((x.clone(), ty.clone()));
        t = body;
    }
    let (x, _) = params.pop()?;
    let HostTerm::Iff(lhs, rhs) = t else { return None };
    let HostTerm::Mem(xv, applied) = &**lhs else { return None };
    let HostTerm::And(m, body) = &**rhs else { return None };
    let HostTerm::Mem(xv2, set) = &**m else { return None };
    if **xv != host::ivar(&x) || **xv2 != host::ivar(&x) {
        return None;
    }
    let (head, args) = applied.unapply();
    let HostTerm::Const(sym, _) = head else { return None };
    let expected: Vec<HostTerm> = params.iter().map(|(n, ty)| host::var(n, ty.clone())).collect();
    if args.len() != expected.len() || args.iter().zip(&expected).any(|(a, e)| *a != e) {
        return None;
    }
    Some(SepDef {
        sym: sym.clone(),
        params,
        x,
        set: (**set).clone(),
        body: (**body).clone(),
    })
}

fn expand(t: &HostTerm, defs: &BTreeMap<String, SepDef>) -> HostTerm {
    use HostTerm::*;
    if let App(..) | Const(..) = t {
        let (head, args) = t.unapply();
        if let Const(c, _) = head {
            if let Some(d) = defs.get(c) {
                if args.len() == d.params.len() {
                    let args: Vec<HostTerm> = args.into_iter().map(|a| expand(a, defs)).collect();
                    let mut s = host::sep(&d.x, d.set.clone(), d.body.clone());
                    let placeholders: Vec<String> = (0..d.params.len()).map(|k| format!("#p{k}")).collect();
                    for ((n, ty), ph) in d.params.iter().zip(&placeholders) {
                        s = s.subst(n, &host::var(ph, ty.clone()));
                    }
                    for (ph, a) in placeholders.iter().zip(args) {
                        s = s.subst(ph, &a);
                    }
                    return s;
                }
            }
        }
    }
    let go = |u: &HostTerm| Box::new(expand(u, defs));
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
        Sep(x, a, b) => Sep(x.clone(), go(a), go(b)),
    }
}

/// Formula records with hoisted separations replaced by their definitions;
/// the separation definitions themselves are dropped.
pub fn inline_seps(doc: &Th0Doc) -> Vec<(String, Role, HostTerm)> {
    let mut defs: BTreeMap<String, SepDef> = BTreeMap::new();
    let mut out = Vec::new();
    for (r, f) in doc.formulas() {
        if r.name.starts_with("def_sep_") {
            if let Some(mut d) = read_sep_def(f) {
                d.set = expand(&d.set, &defs);
                d.body = expand(&d.body, &defs);
                defs.insert(d.sym.clone(), d);
                continue;
            }
        }
        out.push((r.name.clone(), r.role, expand(f, &defs)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::{call, cst, ivar, mem};
    use crate::host::{Origin, Premise};
    use crate::th0::{emit, term_text, EmitOptions};
    use crate::translate::Problem;

    #[test]
    fn terms_round_trip() {
        let x = ivar("x");
        let ts = [
            host::all("x", HostType::Iota, mem(x.clone(), call("ordsucc", [x.clone()]))),
            host::lam("@R", HostType::list(), host::app(host::var("@R", HostType::list()), cst("n0"))),
            host::ex("p", HostType::Omicron, host::iff(host::var("p", HostType::Omicron), HostTerm::Bot)),
            host::all(
                "x",
                HostType::Iota,
                host::eq_i(host::ite(HostTerm::Top, x.clone(), cst("n1")), host::sep("y", x.clone(), HostTerm::Top)),
            ),
        ];
        for t in ts {
            let text = term_text(&t);
            assert_eq!(parse_term(&text).unwrap(), t, "{text}");
        }
    }

    #[test]
    fn precedence() {
        let t = parse_term("$true & $false | $true => $false => $true").unwrap();
        let want = host::imp(
            host::or(host::and(HostTerm::Top, HostTerm::Bot), HostTerm::Top),
            host::imp(HostTerm::Bot, HostTerm::Top),
        );
        assert_eq!(t, want);
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_term("(in @ V_x @ n0)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        assert!(e.msg.contains("unbound"));
        let e = parse_term("(frob @ n0)").unwrap_err();
        assert!(e.msg.contains("undeclared"));
    }

    fn sample() -> Problem {
        let s = host::sep("x", cst("omega"), mem(ivar("x"), ivar("y")));
        Problem {
            label: "p".into(),
            premises: vec![Premise::axiom(
                "kb_a_0",
                host::all("y", HostType::Iota, mem(ivar("y"), s.clone())),
                Origin::Kb,
            )],
            conjecture: host::ex("y", HostType::Iota, mem(cst("n0"), s)),
            notes: vec![],
        }
    }

    #[test]
    fn document_round_trip() {
        let doc = emit(&sample(), &EmitOptions::default());
        let text = doc.to_string();
        let parsed = parse_doc(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(parsed.to_string(), text);
        assert!(check_syntax(&text).is_empty());
        let inlined = inline_seps(&parsed);
        let p = sample();
        assert_eq!(inlined.len(), 2);
        assert!(inlined[0].2.alpha_eq(&p.premises[0].formula));
        assert!(inlined[1].2.alpha_eq(&p.conjecture));
    }

    #[test]
    fn syntax_checks() {
        let errs = check_syntax("thf(a,axiom,$true).\nthf(B,axiom,$true).\nthf(a,conjecture,(f @ n0)).\n");
        let msgs: Vec<&str> = errs.iter().map(|e| e.msg.as_str()).collect();
        assert!(msgs.iter().any(|m| m.contains("invalid record name")), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.contains("undeclared symbol f")), "{msgs:?}");
        assert!(!msgs.iter().any(|m| m.contains("exactly one conjecture")), "{msgs:?}");
        assert_eq!(errs.iter().find(|e| e.msg.contains("undeclared")).unwrap().line, 3);
        let none = check_syntax("thf(a,axiom,$true).\n");
        assert!(none[0].msg.contains("exactly one conjecture, found 0"));
        let two = check_syntax("thf(a,conjecture,$true).\nthf(b,conjecture,$true).\n");
        assert!(two[0].msg.contains("found 2"));
    }
}
