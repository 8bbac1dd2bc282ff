//! SUMO-K terms, spines and formulas to host terms, and query problem assembly.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ast::{ArithOp, Builtin, Head, SumoFormula, SumoSpine, SumoTerm, VarSort};
use crate::guards::{self, ClassMode, Guard, GuardForm, GuardOptions, RelRef};
use crate::host::catalog::{self, CatalogError};
use crate::host::{self, call, cst, HostError, HostTerm, HostType, Origin, Premise};
use crate::names::{self, NameCollision, NameMap, ROW_MARK};
use crate::signature::{self, ClassRef, CollectOptions, DomainMode, Signature, SignatureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unbound variable ?{0}")]
    UnboundVariable(String),
    #[error("row variable @{0} used as a term")]
    RowVariableAsTerm(String),
    #[error(transparent)]
    Name(#[from] NameCollision),
    #[error(transparent)]
    Type(#[from] HostError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("unknown premise name in selection: {0}")]
    UnknownPremiseName(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    pub guards: GuardOptions,
    pub collect: CollectOptions,
}

/// Classes that are not subsets of the universe of discourse.
pub const SPECIAL_CLASSES: [&str; 4] = ["Class", "SetOrClass", "Abstract", "Entity"];

fn row_host(name: &str) -> String {
    format!("{ROW_MARK}{name}")
}

fn typed_free(free: &[(String, VarSort)]) -> Vec<(String, HostType)> {
    free.iter()
        .map(|(n, s)| match s {
            VarSort::Individual => (n.clone(), HostType::Iota),
            VarSort::Row => (row_host(n), HostType::list()),
        })
        .collect()
}

pub struct Translator<'a> {
    sig: &'a Signature,
    opts: TranslateOptions,
    names: NameMap,
    env: Vec<(String, VarSort)>,
    explanations: Vec<String>,
}

impl<'a> Translator<'a> {
    pub fn new(sig: &'a Signature, opts: TranslateOptions) -> Self {
        Translator {
            sig,
            opts,
            names: NameMap::default(),
            env: Vec::new(),
            explanations: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        self.sig
    }

    /// Guard derivations recorded since the last call.
    pub fn take_explanations(&mut self) -> Vec<String> {
        std::mem::take(&mut self.explanations)
    }

    fn bound(&self, name: &str) -> Option<VarSort> {
        self.env.iter().rev().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    fn with_bound<T>(
        &mut self,
        vars: &[(String, VarSort)],
        f: impl FnOnce(&mut Self) -> Result<T, TranslateError>,
    ) -> Result<T, TranslateError> {
        let n = self.env.len();
        self.env.extend(vars.iter().cloned());
        let r = f(self);
        self.env.truncate(n);
        r
    }

    /// Host counterpart of a SUMO constant.
    pub fn constant(&mut self, c: &str) -> Result<HostTerm, TranslateError> {
        if c == "Class" {
            return Ok(call("power", [cst("univ1")]));
        }
        Ok(host::iota_const(&self.names.host(c)?))
    }

    fn individual(&self, x: &str) -> Result<HostTerm, TranslateError> {
        match self.bound(x) {
            Some(VarSort::Individual) => Ok(host::ivar(x)),
            Some(VarSort::Row) => Err(TranslateError::RowVariableAsTerm(x.to_string())),
            None => Err(TranslateError::UnboundVariable(x.to_string())),
        }
    }

    fn head(&mut self, h: &Head) -> Result<HostTerm, TranslateError> {
        match h {
            Head::Var(v) => self.individual(v),
            Head::Const(c) => self.constant(c),
        }
    }

    pub fn term(&mut self, t: &SumoTerm) -> Result<HostTerm, TranslateError> {
        match t {
            SumoTerm::Var(x) => self.individual(x),
            SumoTerm::Const(c) => self.constant(c),
            SumoTerm::Rat(q) => Ok(host::encode_rational(*q)),
            SumoTerm::Builtin(b) => Ok(cst(match b {
                Builtin::Real => "reals",
                Builtin::Neg => "neg_reals",
                Builtin::Nonneg => "nonneg_reals",
            })),
            SumoTerm::Apply { head, spine } => {
                let h = self.head(head)?;
                Ok(host::ap_list(h, self.spine(spine)?))
            }
            SumoTerm::Kappa { var, body } => {
                let scope = BTreeSet::from([var.clone()]);
                let gs = guards::guards_for(body, &scope, self.sig, self.opts.guards);
                self.note_guards(&format!("KappaFn ?{var}"), &gs.guards);
                let (mut parts, body) = self.with_bound(&[(var.clone(), VarSort::Individual)], |tr| {
                    let g = tr.guard_terms(&gs.guards)?;
                    Ok((g, tr.formula(body)?))
                })?;
                parts.push(body);
                Ok(host::sep(var, cst("univ1"), host::conj(parts)))
            }
            SumoTerm::Arith { op, left, right } => {
                let c = match op {
                    ArithOp::Add => "c_add",
                    ArithOp::Sub => "c_sub",
                    ArithOp::Mul => "c_mult",
                    ArithOp::Div => "c_div",
                };
                let pair = host::mk_list(vec![self.term(left)?, self.term(right)?])?;
                Ok(host::ap_list(cst(c), pair))
            }
            SumoTerm::Embed(f) => Ok(host::bool_of(self.formula(f)?)),
        }
    }

    pub fn spine(&mut self, s: &SumoSpine) -> Result<HostTerm, TranslateError> {
        match s {
            SumoSpine::Terms(items) => {
                let items = items.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?;
                Ok(host::mk_list(items)?)
            }
            SumoSpine::RowTail {
                prefix,
                row,
                suffix,
            } => {
                match self.bound(row) {
                    Some(VarSort::Row) => {}
                    _ => return Err(TranslateError::UnboundVariable(row.clone())),
                }
                let rho = host::var(&row_host(row), HostType::list());
                let tail = if suffix.is_empty() {
                    rho
                } else {
                    let items: Vec<HostTerm> =
                        suffix.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?;
                    let rest = host::mk_list(items)?;
                    let taken: BTreeSet<String> =
                        rest.free_vars().into_iter().map(|(n, _)| n).collect();
                    let j = (0..)
                        .map(|k| if k == 0 { "j".to_string() } else { format!("j{k}") })
                        .find(|n| !taken.contains(n))
                        .expect("fresh name");
                    let jv = host::ivar(&j);
                    let len = call("len", [rho.clone()]);
                    host::lam(
                        &j,
                        HostType::Iota,
                        host::ite(
                            host::mem(jv.clone(), len.clone()),
                            host::app(rho, jv.clone()),
                            host::app(rest, call("ord_sub", [jv, len])),
                        ),
                    )
                };
                prefix.iter().rev().try_fold(tail, |acc, t| {
                    Ok(call("cons", [self.term(t)?, acc]))
                })
            }
        }
    }

    fn pair(&mut self, a: &SumoTerm, b: &SumoTerm) -> Result<HostTerm, TranslateError> {
        Ok(host::mk_list(vec![self.term(a)?, self.term(b)?])?)
    }

    pub fn formula(&mut self, f: &SumoFormula) -> Result<HostTerm, TranslateError> {
        use SumoFormula as F;
        Ok(match f {
            F::Bot => HostTerm::Bot,
            F::Top => HostTerm::Top,
            F::Not(g) => host::not(self.formula(g)?),
            F::Impl(a, b) => host::imp(self.formula(a)?, self.formula(b)?),
            F::Iff(a, b) => host::iff(self.formula(a)?, self.formula(b)?),
            F::And(items) => host::conj(items.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            F::Or(items) => host::disj(items.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            F::ForallVars(vars, body) => self.quantified(vars, VarSort::Individual, body, true)?,
            F::ExistsVars(vars, body) => self.quantified(vars, VarSort::Individual, body, false)?,
            F::ForallRow(r, body) => self.quantified(std::slice::from_ref(r), VarSort::Row, body, true)?,
            F::ExistsRow(r, body) => self.quantified(std::slice::from_ref(r), VarSort::Row, body, false)?,
            F::Eq(a, b) => host::eq_i(self.term(a)?, self.term(b)?),
            F::Instance(a, b) => host::mem(self.term(a)?, self.term(b)?),
            F::Subclass(a, b) => host::subq(self.term(a)?, self.term(b)?),
            F::Le(a, b) => host::prop_of(host::ap_list(cst("c_leq"), self.pair(a, b)?)),
            F::Lt(a, b) => host::prop_of(host::ap_list(cst("c_lessthan"), self.pair(a, b)?)),
            F::Atom { head, spine } => {
                let h = self.head(head)?;
                host::prop_of(host::ap_list(h, self.spine(spine)?))
            }
        })
    }

    fn quantified(
        &mut self,
        vars: &[String],
        sort: VarSort,
        body: &SumoFormula,
        universal: bool,
    ) -> Result<HostTerm, TranslateError> {
        let scope: BTreeSet<String> = vars.iter().cloned().collect();
        let gs = guards::guards_for(body, &scope, self.sig, self.opts.guards);
        let sorted: Vec<(String, VarSort)> = vars.iter().map(|v| (v.clone(), sort)).collect();
        self.note_guards(if universal { "forall" } else { "exists" }, &gs.guards);
        let (gterms, body) = self.with_bound(&sorted, |tr| {
            Ok((tr.guard_terms(&gs.guards)?, tr.formula(body)?))
        })?;
        let typed = typed_free(&sorted);
        Ok(if universal {
            guards::close_assertion(body, gterms, &typed)?
        } else {
            guards::close_existential(body, gterms, &typed)?
        })
    }

    fn note_guards(&mut self, context: &str, gs: &[Guard]) {
        if !gs.is_empty() {
            let mut text = format!("{context}:\n");
            for g in gs {
                text.push_str(&format!("  {}: {}  [{}]\n", g.subject, g.form, g.reason));
            }
            self.explanations.push(text);
        }
    }

    fn class_term(&mut self, c: &ClassRef) -> Result<HostTerm, TranslateError> {
        let base = self.constant(&c.class)?;
        Ok(match c.mode {
            DomainMode::Instance => base,
            DomainMode::Subclass => call("power", [base]),
        })
    }

    fn relation(&mut self, r: &RelRef) -> Result<HostTerm, TranslateError> {
        match r {
            RelRef::Const(c) => self.constant(c),
            RelRef::Var(v) => self.individual(v),
        }
    }

    /// Host proposition for one guard; its variables must be bound.
    pub fn guard_term(&mut self, g: &Guard) -> Result<HostTerm, TranslateError> {
        let subject = || host::ivar(&g.subject);
        Ok(match &g.form {
            GuardForm::MemDomseqm { relation, index0 } => {
                let r = self.relation(relation)?;
                host::mem(
                    subject(),
                    call("domseqm", [r, host::numeral(u128::from(*index0))]),
                )
            }
            GuardForm::MemClass { class, mode } => {
                let c = self.constant(class)?;
                match mode {
                    ClassMode::Member => host::mem(subject(), c),
                    ClassMode::Subset => host::subq(subject(), c),
                }
            }
            GuardForm::RowDomOf { relation, spine } => {
                let r = self.relation(relation)?;
                let s = self.spine(spine)?;
                call(
                    "dom_of",
                    [
                        call("vararity", [r.clone()]),
                        call("arity", [r.clone()]),
                        call("domseq", [r]),
                        s,
                    ],
                )
            }
            GuardForm::RowDomOfKnown {
                vararity,
                min_arity,
                domains,
                spine,
                ..
            } => {
                let s = self.spine(spine)?;
                let doms: Vec<HostTerm> =
                    domains.iter().map(|d| self.class_term(d)).collect::<Result<_, _>>()?;
                let last = doms.last().cloned().unwrap_or_else(|| cst("emptyset"));
                let i = host::ivar("i");
                let table = doms.iter().enumerate().rev().skip(1).fold(last, |acc, (k, d)| {
                    host::ite(
                        host::eq_i(i.clone(), host::numeral(k as u128)),
                        d.clone(),
                        acc,
                    )
                });
                let name = if *vararity { "dom_of_varar" } else { "dom_of_fixedar" };
                call(
                    name,
                    [
                        host::numeral(u128::from(*min_arity)),
                        host::lam("i", HostType::Iota, table),
                        s,
                    ],
                )
            }
        })
    }

    fn guard_terms(&mut self, gs: &[Guard]) -> Result<Vec<HostTerm>, TranslateError> {
        gs.iter().map(|g| self.guard_term(g)).collect()
    }

    /// Universal closure of an assertion over its free variables, guards as implications.
    pub fn assertion(&mut self, f: &SumoFormula) -> Result<HostTerm, TranslateError> {
        self.closed(f, true)
    }

    /// Existential closure with conjoined guards; used for queries.
    pub fn query(&mut self, f: &SumoFormula) -> Result<HostTerm, TranslateError> {
        self.closed(f, false)
    }

    fn closed(&mut self, f: &SumoFormula, universal: bool) -> Result<HostTerm, TranslateError> {
        let free = f.free_vars();
        let scope: BTreeSet<String> = free.iter().map(|(n, _)| n.clone()).collect();
        let gs = guards::guards_for(f, &scope, self.sig, self.opts.guards);
        self.note_guards("free variables", &gs.guards);
        let (gterms, body) = self.with_bound(&free, |tr| {
            Ok((tr.guard_terms(&gs.guards)?, tr.formula(f)?))
        })?;
        let typed = typed_free(&free);
        Ok(if universal {
            guards::close_assertion(body, gterms, &typed)?
        } else {
            guards::close_existential(body, gterms, &typed)?
        })
    }
}

/// A named top-level assertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbAssertion {
    pub name: String,
    pub formula: SumoFormula,
}

/// Translated knowledge base together with the signature it was translated under.
#[derive(Debug, Clone)]
pub struct KbTranslation {
    pub assertions: Vec<KbAssertion>,
    pub signature: Signature,
    pub premises: Vec<Premise>,
    /// Assertions that failed to translate; they are left out of `premises`.
    pub errors: Vec<(String, TranslateError)>,
    pub explanations: Vec<(String, String)>,
}

impl KbTranslation {
    pub fn new(assertions: Vec<KbAssertion>, opts: TranslateOptions) -> Result<Self, TranslateError> {
        let formulas: Vec<SumoFormula> = assertions.iter().map(|a| a.formula.clone()).collect();
        let (signature, _) = signature::analyze(&formulas, opts.collect)?;
        Ok(Self::with_signature(assertions, signature, opts))
    }

    pub fn with_signature(assertions: Vec<KbAssertion>, signature: Signature, opts: TranslateOptions) -> Self {
        let (premises, errors, explanations) = translate_kb(&signature, &assertions, opts);
        KbTranslation {
            assertions,
            signature,
            premises,
            errors,
            explanations,
        }
    }
}

type KbOutput = (Vec<Premise>, Vec<(String, TranslateError)>, Vec<(String, String)>);

/// Translates every assertion independently; failures are collected, not fatal.
pub fn translate_kb(sig: &Signature, assertions: &[KbAssertion], opts: TranslateOptions) -> KbOutput {
    let mut tr = Translator::new(sig, opts);
    let mut premises = Vec::new();
    let mut errors = Vec::new();
    let mut explanations = Vec::new();
    for a in assertions {
        match tr.assertion(&a.formula) {
            Ok(t) => premises.push(Premise::axiom(a.name.clone(), t, Origin::Kb)),
            Err(e) => errors.push((a.name.clone(), e)),
        }
        let text = tr.take_explanations().concat();
        if !text.is_empty() {
            explanations.push((a.name.clone(), text));
        }
    }
    (premises, errors, explanations)
}

fn sumo_constants(terms: &[&HostTerm]) -> BTreeSet<String> {
    terms
        .iter()
        .flat_map(|t| t.constants())
        .filter_map(|c| names::sumo_const(&c))
        .collect()
}

/// Arity, variable-arity, domain and class facts for the SUMO constants in use, closed
/// under the constants the facts themselves mention.
pub fn relation_facts(sig: &Signature, used: &BTreeSet<String>) -> Result<Vec<Premise>, TranslateError> {
    let mut tr = Translator::new(sig, TranslateOptions::default());
    let classes: BTreeSet<String> = sig.classes().into_iter().map(str::to_string).collect();
    let mut done: BTreeSet<String> = BTreeSet::new();
    let mut pending: BTreeSet<String> = used.clone();
    let mut facts: BTreeMap<String, Vec<Premise>> = BTreeMap::new();
    while let Some(c) = pending.pop_first() {
        if !done.insert(c.clone()) {
            continue;
        }
        let mut out = Vec::new();
        let tag = format!("rel_{}", names::escape(&c));
        let me = tr.constant(&c)?;
        if let Some(info) = sig.get(&c).filter(|i| i.has_relation_data()) {
            out.push(Premise::axiom(
                format!("{tag}_arity"),
                host::eq_i(call("arity", [me.clone()]), host::numeral(u128::from(info.min_arity))),
                Origin::RelationFact,
            ));
            let va = call("vararity", [me.clone()]);
            out.push(Premise::axiom(
                format!("{tag}_vararity"),
                if info.var_arity { va } else { host::not(va) },
                Origin::RelationFact,
            ));
            let slots = info.min_arity + u32::from(info.var_arity);
            for i in 0..slots {
                let sumo_index = (i + 1).min(info.min_arity);
                let class = info.arg_domain[&sumo_index].clone();
                let value = tr.class_term(&class)?;
                out.push(Premise::axiom(
                    format!("{tag}_domseq{i}"),
                    host::eq_i(call("domseq", [me.clone(), host::numeral(u128::from(i))]), value),
                    Origin::RelationFact,
                ));
            }
        }
        match c.as_str() {
            "Entity" => out.push(Premise::axiom(
                format!("{tag}_special"),
                host::and(
                    host::subq(cst("univ1"), me.clone()),
                    host::subq(call("power", [cst("univ1")]), me.clone()),
                ),
                Origin::RelationFact,
            )),
            "SetOrClass" | "Abstract" => out.push(Premise::axiom(
                format!("{tag}_special"),
                host::subq(call("power", [cst("univ1")]), me.clone()),
                Origin::RelationFact,
            )),
            "Class" => {}
            _ if classes.contains(&c) => out.push(Premise::axiom(
                format!("{tag}_class"),
                host::mem(me.clone(), call("power", [cst("univ1")])),
                Origin::RelationFact,
            )),
            _ => {}
        }
        let refs: Vec<&HostTerm> = out.iter().map(|p| &p.formula).collect();
        for d in sumo_constants(&refs) {
            if !done.contains(&d) {
                pending.insert(d);
            }
        }
        facts.insert(c, out);
    }
    Ok(facts.into_values().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub label: String,
    pub premises: Vec<Premise>,
    pub conjecture: HostTerm,
    /// Interpretation notes for the emitted header.
    pub notes: Vec<String>,
}

impl Problem {
    pub fn premise(&self, name: &str) -> Option<&Premise> {
        self.premises.iter().find(|p| p.name == name)
    }

    pub fn typecheck(&self) -> Result<(), HostError> {
        for t in self.premises.iter().map(|p| &p.formula).chain([&self.conjecture]) {
            let ty = t.typecheck()?;
            if ty != HostType::Omicron {
                return Err(HostError::TypeMismatch {
                    subterm: t.to_string(),
                    expected: HostType::Omicron.to_string(),
                    found: ty.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Assembles one problem: catalog background, relation facts, KB and local premises,
/// and the query as conjecture. `selection` keeps only the named premises.
pub fn build_query_problem(
    label: &str,
    kb: &KbTranslation,
    locals: &[KbAssertion],
    query: &SumoFormula,
    selection: Option<&[String]>,
    opts: TranslateOptions,
) -> Result<Problem, TranslateError> {
    let formulas: Vec<SumoFormula> = kb
        .assertions
        .iter()
        .chain(locals)
        .map(|a| a.formula.clone())
        .collect();
    let (sig, _) = signature::analyze(&formulas, opts.collect)?;
    let retranslated;
    let kb_premises: &[Premise] = if sig == kb.signature {
        &kb.premises
    } else {
        retranslated = KbTranslation::with_signature(kb.assertions.clone(), sig.clone(), opts);
        &retranslated.premises
    };

    let mut tr = Translator::new(&sig, opts);
    let mut local_premises = Vec::new();
    for (k, a) in locals.iter().enumerate() {
        let name = if a.name.is_empty() {
            format!("local_{}", k + 1)
        } else {
            a.name.clone()
        };
        local_premises.push(Premise::axiom(name, tr.assertion(&a.formula)?, Origin::Local));
    }
    let conjecture = tr.query(query)?;

    let mut notes = Vec::new();
    if !query.free_vars().is_empty() {
        notes.push("free variables of the query are existentially closed with conjoined guards".into());
    }

    let mut body: Vec<&HostTerm> = kb_premises.iter().map(|p| &p.formula).collect();
    body.extend(local_premises.iter().map(|p| &p.formula));
    body.push(&conjecture);
    let facts = relation_facts(&sig, &sumo_constants(&body))?;

    let mut needed: BTreeSet<String> = BTreeSet::new();
    for t in body.iter().copied().chain(facts.iter().map(|p| &p.formula)) {
        needed.extend(t.symbols().into_iter().filter(|s| catalog::is_catalog_name(s)));
    }
    let background = catalog::background(&needed)?;

    let used: BTreeSet<String> = sumo_constants(&body);
    if used.iter().any(|c| SPECIAL_CLASSES.contains(&c.as_str())) || needed.contains("univ1") {
        notes.push("Class is the power set of univ1; Entity contains univ1 and its power set; SetOrClass and Abstract contain the power set of univ1".into());
    }

    let mut premises: Vec<Premise> = background;
    premises.extend(facts);
    premises.extend(kb_premises.iter().cloned());
    premises.extend(local_premises);

    if let Some(keep) = selection {
        let known: BTreeSet<&str> = premises.iter().map(|p| p.name.as_str()).collect();
        if let Some(bad) = keep.iter().find(|n| !known.contains(n.as_str())) {
            return Err(TranslateError::UnknownPremiseName(bad.clone()));
        }
        let keep: BTreeSet<&str> = keep.iter().map(String::as_str).collect();
        premises.retain(|p| keep.contains(p.name.as_str()));
    }

    let problem = Problem {
        label: label.to_string(),
        premises,
        conjecture,
        notes,
    };
    problem.typecheck()?;
    Ok(problem)
}

/// Reads a premise-selection file: one name per line, `#` comments.
pub fn parse_selection(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
