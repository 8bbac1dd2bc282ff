//! Implicit type guards for variables, inferred from their argument positions.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Head, SumoFormula, SumoSpine, SumoTerm, VarSort};
use crate::host::{self, HostError, HostTerm, HostType};
use crate::signature::{ClassRef, DomainMode, Signature, TOP_CLASS};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelRef {
    Const(String),
    Var(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassMode {
    Member,
    Subset,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GuardForm {
    /// `x ∈ domseqm r j`, with `j` 0-based.
    MemDomseqm { relation: RelRef, index0: u32 },
    /// `x ∈ C` or `x ⊆ C` for a SUMO class constant.
    MemClass { class: String, mode: ClassMode },
    /// `dom_of (vararity r) (arity r) (domseq r) s` for the translated spine `s`.
    RowDomOf { relation: RelRef, spine: SumoSpine },
    /// The same condition spelled out from a constant's known signature.
    RowDomOfKnown {
        relation: String,
        vararity: bool,
        min_arity: u32,
        /// Domains for indices `0..min_arity`, plus the rest domain when variable arity.
        domains: Vec<ClassRef>,
        spine: SumoSpine,
    },
}

#[derive(Debug, Clone)]
pub struct Guard {
    pub subject: String,
    pub sort: VarSort,
    pub form: GuardForm,
    /// Human-readable derivation; ignored by equality.
    pub reason: String,
}

impl PartialEq for Guard {
    fn eq(&self, other: &Self) -> bool {
        self.subject == other.subject && self.sort == other.sort && self.form == other.form
    }
}

impl Eq for Guard {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuardOptions {
    /// Use the signature-specific row guard for constant heads.
    pub expand_known_row_guards: bool,
    /// Guard `x` by a function's range when `x` is equated with an application of it.
    pub range_guards: bool,
}

impl Default for GuardOptions {
    fn default() -> Self {
        GuardOptions {
            expand_known_row_guards: false,
            range_guards: true,
        }
    }
}

/// Guards in global first-occurrence order, deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GuardSet {
    pub guards: Vec<Guard>,
}

impl GuardSet {
    fn push(&mut self, g: Guard) {
        if !self.guards.contains(&g) {
            self.guards.push(g);
        }
    }

    pub fn for_var(&self, name: &str) -> Vec<&Guard> {
        self.guards.iter().filter(|g| g.subject == name).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.guards.is_empty()
    }

    pub fn len(&self) -> usize {
        self.guards.len()
    }

    pub fn explain(&self) -> String {
        self.guards
            .iter()
            .map(|g| format!("{}: {}  [{}]\n", g.subject, g.form, g.reason))
            .collect()
    }
}

impl fmt::Display for RelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelRef::Const(c) => f.write_str(c),
            RelRef::Var(v) => write!(f, "?{v}"),
        }
    }
}

impl fmt::Display for GuardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardForm::MemDomseqm { relation, index0 } => {
                write!(f, "in (domseqm {relation} {index0})")
            }
            GuardForm::MemClass { class, mode } => match mode {
                ClassMode::Member => write!(f, "in {class}"),
                ClassMode::Subset => write!(f, "subset of {class}"),
            },
            GuardForm::RowDomOf { relation, spine } => write!(f, "dom_of {relation} ({spine})"),
            GuardForm::RowDomOfKnown {
                relation,
                vararity,
                min_arity,
                spine,
                ..
            } => write!(
                f,
                "dom_of {relation} ({spine}) expanded: vararity={vararity} arity={min_arity}"
            ),
        }
    }
}

struct Walker<'a> {
    scope: &'a BTreeSet<String>,
    sig: &'a Signature,
    opts: GuardOptions,
    shadow: Vec<String>,
    out: GuardSet,
}

fn term_mentions(t: &SumoTerm, names: &[String]) -> bool {
    t.free_vars().iter().any(|(n, _)| names.contains(n))
}

impl Walker<'_> {
    fn wanted(&self, x: &str) -> bool {
        self.scope.contains(x) && !self.shadow.iter().any(|s| s == x)
    }

    fn push(&mut self, subject: &str, sort: VarSort, form: GuardForm, reason: String) {
        self.out.push(Guard {
            subject: subject.to_string(),
            sort,
            form,
            reason,
        });
    }

    fn slot_guard(&self, head: &Head, j: usize) -> Option<GuardForm> {
        let index0 = u32::try_from(j).ok()?;
        match head {
            Head::Var(v) => {
                if self.shadow.contains(v) {
                    return None;
                }
                Some(GuardForm::MemDomseqm {
                    relation: RelRef::Var(v.clone()),
                    index0,
                })
            }
            Head::Const(c) => {
                let info = self.sig.get(c).filter(|i| i.has_relation_data())?;
                let slot = if info.var_arity {
                    (index0 + 1).min(info.min_arity)
                } else if index0 < info.min_arity {
                    index0 + 1
                } else {
                    return None;
                };
                let class = info.arg_domain.get(&slot)?;
                Some(match class.mode {
                    DomainMode::Subclass => GuardForm::MemClass {
                        class: class.class.clone(),
                        mode: ClassMode::Subset,
                    },
                    DomainMode::Instance => GuardForm::MemDomseqm {
                        relation: RelRef::Const(c.clone()),
                        index0,
                    },
                })
            }
        }
    }

    fn row_guard(&self, head: &Head, spine: &SumoSpine) -> Option<GuardForm> {
        if spine.all_terms().any(|t| term_mentions(t, &self.shadow)) {
            return None;
        }
        match head {
            Head::Var(v) if self.shadow.contains(v) => None,
            Head::Var(v) => Some(GuardForm::RowDomOf {
                relation: RelRef::Var(v.clone()),
                spine: spine.clone(),
            }),
            Head::Const(c) => {
                let info = self.sig.get(c).filter(|i| i.has_relation_data())?;
                if !self.opts.expand_known_row_guards {
                    return Some(GuardForm::RowDomOf {
                        relation: RelRef::Const(c.clone()),
                        spine: spine.clone(),
                    });
                }
                let top = ClassRef::instance(TOP_CLASS);
                let mut domains: Vec<ClassRef> = (1..=info.min_arity)
                    .map(|k| info.arg_domain.get(&k).cloned().unwrap_or_else(|| top.clone()))
                    .collect();
                if info.var_arity {
                    domains.push(domains.last().cloned().unwrap_or(top));
                }
                Some(GuardForm::RowDomOfKnown {
                    relation: c.clone(),
                    vararity: info.var_arity,
                    min_arity: info.min_arity,
                    domains,
                    spine: spine.clone(),
                })
            }
        }
    }

    fn application(&mut self, head: &Head, spine: &SumoSpine) {
        for (j, t) in spine.positional().iter().enumerate() {
            if let SumoTerm::Var(x) = t {
                if self.wanted(x) {
                    if let Some(form) = self.slot_guard(head, j) {
                        self.push(x, VarSort::Individual, form, format!("argument {} of {head}", j + 1));
                    }
                }
            }
            self.term(t);
        }
        if let SumoSpine::RowTail { row, suffix, .. } = spine {
            if self.wanted(row) {
                if let Some(form) = self.row_guard(head, spine) {
                    self.push(row, VarSort::Row, form, format!("row spine of {head}"));
                }
            }
            for t in suffix {
                self.term(t);
            }
        }
    }

    fn range_guard(&mut self, x: &str, other: &SumoTerm) {
        let SumoTerm::Apply {
            head: Head::Const(f),
            ..
        } = other
        else {
            return;
        };
        let Some(range) = self.sig.get(f).and_then(|i| i.range.as_ref()) else {
            return;
        };
        let mode = match range.mode {
            DomainMode::Instance => ClassMode::Member,
            DomainMode::Subclass => ClassMode::Subset,
        };
        self.push(
            x,
            VarSort::Individual,
            GuardForm::MemClass {
                class: range.class.clone(),
                mode,
            },
            format!("range of {f} (equality heuristic)"),
        );
    }

    fn term(&mut self, t: &SumoTerm) {
        match t {
            SumoTerm::Var(_) | SumoTerm::Const(_) | SumoTerm::Rat(_) | SumoTerm::Builtin(_) => {}
            SumoTerm::Apply { head, spine } => self.application(head, spine),
            SumoTerm::Kappa { var, body } => {
                self.shadow.push(var.clone());
                self.formula(body);
                self.shadow.pop();
            }
            SumoTerm::Arith { left, right, .. } => {
                self.term(left);
                self.term(right);
            }
            SumoTerm::Embed(f) => self.formula(f),
        }
    }

    fn formula(&mut self, f: &SumoFormula) {
        use SumoFormula::*;
        match f {
            Bot | Top => {}
            Not(g) => self.formula(g),
            Impl(a, b) | Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            And(items) | Or(items) => items.iter().for_each(|g| self.formula(g)),
            ForallVars(names, body) | ExistsVars(names, body) => {
                let n = self.shadow.len();
                self.shadow.extend(names.iter().cloned());
                self.formula(body);
                self.shadow.truncate(n);
            }
            ForallRow(name, body) | ExistsRow(name, body) => {
                self.shadow.push(name.clone());
                self.formula(body);
                self.shadow.pop();
            }
            Instance(a, b) => {
                if let SumoTerm::Var(x) = a {
                    if self.wanted(x) {
                        self.push(
                            x,
                            VarSort::Individual,
                            GuardForm::MemClass {
                                class: TOP_CLASS.to_string(),
                                mode: ClassMode::Member,
                            },
                            "first argument of instance".into(),
                        );
                    }
                }
                self.term(a);
                self.term(b);
            }
            Eq(a, b) => {
                if self.opts.range_guards {
                    for (x, other) in [(a, b), (b, a)] {
                        if let SumoTerm::Var(x) = x {
                            if self.wanted(x) {
                                self.range_guard(x, other);
                            }
                        }
                    }
                }
                self.term(a);
                self.term(b);
            }
            Subclass(a, b) | Le(a, b) | Lt(a, b) => {
                self.term(a);
                self.term(b);
            }
            Atom { head, spine } => self.application(head, spine),
        }
    }
}

/// Guards for the variables in `scope` occurring free in `formula`.
pub fn guards_for(
    formula: &SumoFormula,
    scope: &BTreeSet<String>,
    sig: &Signature,
    opts: GuardOptions,
) -> GuardSet {
    let mut w = Walker {
        scope,
        sig,
        opts,
        shadow: Vec::new(),
        out: GuardSet::default(),
    };
    w.formula(formula);
    w.out
}

fn check_prop(t: &HostTerm) -> Result<(), HostError> {
    match t.typecheck()? {
        HostType::Omicron => Ok(()),
        other => Err(HostError::TypeMismatch {
            subterm: t.to_string(),
            expected: HostType::Omicron.to_string(),
            found: other.to_string(),
        }),
    }
}

/// `∀x₁…xₙ. G₁ → … → Gₘ → body`
pub fn close_assertion(
    body: HostTerm,
    guards: Vec<HostTerm>,
    free: &[(String, HostType)],
) -> Result<HostTerm, HostError> {
    check_prop(&body)?;
    guards.iter().try_for_each(check_prop)?;
    Ok(host::all_many(free, host::imp_chain(guards, body)))
}

/// `∃x₁…xₙ. G₁ ∧ … ∧ Gₘ ∧ body`
pub fn close_existential(
    body: HostTerm,
    mut guards: Vec<HostTerm>,
    free: &[(String, HostType)],
) -> Result<HostTerm, HostError> {
    check_prop(&body)?;
    guards.iter().try_for_each(check_prop)?;
    guards.push(body);
    Ok(host::ex_many(free, host::conj(guards)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower::{lower, LowerResult};
    use crate::sexpr::parse_forms;
    use crate::signature::{analyze, CollectOptions};

    const DECLS: &str = "
        (instance partition VariableArityRelation) (domain partition 1 Class) (domain partition 2 Class)
        (domain subrelation 1 Relation) (domain subrelation 2 Relation)
        (domain attribute 1 Object) (domain attribute 2 Attribute)
        (domainSubclass immediateSubclass 1 Class) (domain immediateSubclass 2 Class)
        (domain father 1 Animal) (range MotherFn Animal)";

    fn sig() -> Signature {
        let forms: Vec<SumoFormula> = parse_forms(DECLS)
            .unwrap()
            .iter()
            .map(|f| match lower(f).unwrap() {
                LowerResult::Assertion(a) => a,
                _ => unreachable!(),
            })
            .collect();
        analyze(&forms, CollectOptions::default()).unwrap().0
    }

    fn formula(src: &str) -> SumoFormula {
        match lower(&parse_forms(src).unwrap()[0]).unwrap() {
            LowerResult::Assertion(a) => a,
            other => panic!("{other:?}"),
        }
    }

    fn free_scope(f: &SumoFormula) -> BTreeSet<String> {
        f.free_vars().into_iter().map(|(n, _)| n).collect()
    }

    fn dsm(rel: &str, j: u32) -> GuardForm {
        GuardForm::MemDomseqm {
            relation: RelRef::Const(rel.into()),
            index0: j,
        }
    }

    fn summary(gs: &GuardSet) -> Vec<(String, GuardForm)> {
        gs.guards.iter().map(|g| (g.subject.clone(), g.form.clone())).collect()
    }

    #[test]
    fn partition_swap_order() {
        let f = formula("(=> (partition ?SUPER ?SUB1 ?SUB2) (partition ?SUPER ?SUB2 ?SUB1))");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(
            summary(&gs),
            vec![
                ("SUPER".into(), dsm("partition", 0)),
                ("SUB1".into(), dsm("partition", 1)),
                ("SUB2".into(), dsm("partition", 2)),
                ("SUB2".into(), dsm("partition", 1)),
                ("SUB1".into(), dsm("partition", 2)),
            ]
        );
        let sub2: Vec<&GuardForm> = gs.for_var("SUB2").iter().map(|g| &g.form).collect();
        assert_eq!(sub2, [&dsm("partition", 2), &dsm("partition", 1)]);
    }

    #[test]
    fn subrelation_rule_order() {
        let f = formula(
            "(=> (and (subrelation ?REL1 ?REL2) (instance ?REL1 Predicate)
                      (instance ?REL2 Predicate) (?REL1 @ROW))
                 (?REL2 @ROW))",
        );
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        let entity = GuardForm::MemClass {
            class: "Entity".into(),
            mode: ClassMode::Member,
        };
        let row = |r: &str| GuardForm::RowDomOf {
            relation: RelRef::Var(r.into()),
            spine: SumoSpine::row("ROW"),
        };
        assert_eq!(
            summary(&gs),
            vec![
                ("REL1".into(), dsm("subrelation", 0)),
                ("REL2".into(), dsm("subrelation", 1)),
                ("REL1".into(), entity.clone()),
                ("REL2".into(), entity),
                ("ROW".into(), row("REL1")),
                ("ROW".into(), row("REL2")),
            ]
        );
    }

    #[test]
    fn row_rule_uses_generic_form_by_default() {
        let f = formula("(=> (partition @ROW) (partition @ROW))");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(gs.len(), 1);
        assert!(matches!(gs.guards[0].form, GuardForm::RowDomOf { .. }));
        let expanded = guards_for(
            &f,
            &free_scope(&f),
            &sig(),
            GuardOptions {
                expand_known_row_guards: true,
                ..Default::default()
            },
        );
        match &expanded.guards[0].form {
            GuardForm::RowDomOfKnown {
                vararity,
                min_arity,
                domains,
                ..
            } => {
                assert!(vararity);
                assert_eq!(*min_arity, 2);
                assert_eq!(domains.len(), 3);
                assert!(domains.iter().all(|d| d.class == "Class"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_only_gives_nothing() {
        let f = formula("(equal ?X ?Y)");
        assert!(guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default()).is_empty());
    }

    #[test]
    fn range_heuristic() {
        let f = formula("(equal ?M (MotherFn ?C))");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(
            gs.for_var("M")[0].form,
            GuardForm::MemClass {
                class: "Animal".into(),
                mode: ClassMode::Member
            }
        );
        let off = GuardOptions {
            range_guards: false,
            ..Default::default()
        };
        assert!(guards_for(&f, &free_scope(&f), &sig(), off).is_empty());
    }

    #[test]
    fn subclass_slots_use_subset() {
        let f = formula("(immediateSubclass ?A ?B)");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(
            summary(&gs),
            vec![
                (
                    "A".into(),
                    GuardForm::MemClass {
                        class: "Class".into(),
                        mode: ClassMode::Subset
                    }
                ),
                ("B".into(), dsm("immediateSubclass", 1)),
            ]
        );
    }

    #[test]
    fn fixed_arity_beyond_declared_is_unguarded() {
        let f = formula("(father ?A ?B)");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(summary(&gs), vec![("A".into(), dsm("father", 0))]);
    }

    #[test]
    fn inner_binders_shadow() {
        let f = formula("(and (attribute ?X Red) (exists (?X) (attribute ?X Blue)))");
        let gs = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(gs.len(), 1);
        let f = formula("(forall (?R) (?R @ROW))");
        assert!(guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default()).is_empty());
    }

    #[test]
    fn kappa_body_guards() {
        let f = formula("(and (instance ?p Planet) (attribute ?p Earthlike))");
        let scope = BTreeSet::from(["p".to_string()]);
        let gs = guards_for(&f, &scope, &sig(), GuardOptions::default());
        assert_eq!(
            summary(&gs),
            vec![
                (
                    "p".into(),
                    GuardForm::MemClass {
                        class: "Entity".into(),
                        mode: ClassMode::Member
                    }
                ),
                ("p".into(), dsm("attribute", 0)),
            ]
        );
    }

    #[test]
    fn deterministic() {
        let f = formula("(=> (partition ?SUPER ?SUB1 ?SUB2) (partition ?SUPER ?SUB2 ?SUB1))");
        let a = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        let b = guards_for(&f, &free_scope(&f), &sig(), GuardOptions::default());
        assert_eq!(a, b);
        assert!(a.explain().contains("argument 2 of partition"));
    }

    #[test]
    fn closing() {
        let body = host::mem(host::ivar("x"), host::ivar("A"));
        assert_eq!(close_assertion(body.clone(), vec![], &[]).unwrap(), body);
        let g = host::mem(host::ivar("x"), host::ivar("B"));
        let closed = close_assertion(body.clone(), vec![g.clone()], &[("x".into(), HostType::Iota)]).unwrap();
        assert_eq!(closed, host::all("x", HostType::Iota, host::imp(g.clone(), body.clone())));
        let ex = close_existential(body.clone(), vec![g.clone()], &[("x".into(), HostType::Iota)]).unwrap();
        assert_eq!(ex, host::ex("x", HostType::Iota, host::and(g, body)));
        assert!(close_assertion(host::ivar("x"), vec![], &[]).is_err());
    }
}
