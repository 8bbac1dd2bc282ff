//! Collection of typing declarations and the variable-arity closure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::ast::{SumoFormula, SumoSpine, SumoTerm};

pub const VARIABLE_ARITY_RELATION: &str = "VariableArityRelation";
/// Class used to fill undeclared argument slots below the minimum arity.
pub const TOP_CLASS: &str = "Entity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainMode {
    /// `domain`/`range`: the argument is an instance of the class.
    Instance,
    /// `domainSubclass`/`rangeSubclass`: the argument is a subclass of the class.
    Subclass,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassRef {
    pub class: String,
    pub mode: DomainMode,
}

impl ClassRef {
    pub fn instance(class: &str) -> Self {
        ClassRef {
            class: class.to_string(),
            mode: DomainMode::Instance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstInfo {
    pub min_arity: u32,
    pub var_arity: bool,
    /// 1-based argument index to declared class.
    pub arg_domain: BTreeMap<u32, ClassRef>,
    pub range: Option<ClassRef>,
    pub subrelation_of: BTreeSet<String>,
    pub instance_of: BTreeSet<String>,
    /// Slots copied from a super-relation.
    pub inherited: BTreeSet<u32>,
    pub range_inherited: bool,
    /// Slots filled with the top class because nothing was declared.
    pub filled: BTreeSet<u32>,
}

impl ConstInfo {
    pub fn has_relation_data(&self) -> bool {
        self.min_arity > 0 || self.var_arity
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub consts: BTreeMap<String, ConstInfo>,
    /// Ground `subclass` facts: class to its direct superclasses.
    pub superclasses: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalysisReport {
    pub declarations: usize,
    pub conflicts: usize,
    pub iterations: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CollectOptions {
    /// Keep the first declaration of a slot instead of failing on a conflict.
    pub keep_first_on_conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("conflicting domain declarations for {name} argument {index}")]
    ConflictingDomain { name: String, index: u32 },
    #[error("conflicting range declarations for {name}")]
    ConflictingRange { name: String },
    #[error("declaration contains variables: {0}")]
    NonGroundDeclaration(String),
    #[error("malformed declaration: {0}")]
    MalformedDeclaration(String),
}

fn ground_const(t: &SumoTerm) -> Option<&str> {
    match t {
        SumoTerm::Const(c) => Some(c),
        _ => None,
    }
}

fn declaration_args(spine: &SumoSpine) -> Option<&[SumoTerm]> {
    match spine {
        SumoSpine::Terms(items) => Some(items),
        SumoSpine::RowTail { .. } => None,
    }
}

struct Collector {
    sig: Signature,
    report: AnalysisReport,
    opts: CollectOptions,
}

impl Collector {
    fn entry(&mut self, name: &str) -> &mut ConstInfo {
        self.sig.consts.entry(name.to_string()).or_default()
    }

    fn set_domain(&mut self, name: &str, index: u32, class: ClassRef) -> Result<(), SignatureError> {
        let keep_first = self.opts.keep_first_on_conflict;
        let info = self.entry(name);
        match info.arg_domain.get(&index) {
            Some(existing) if *existing == class => Ok(()),
            Some(_) if keep_first => {
                self.report.conflicts += 1;
                Ok(())
            }
            Some(_) => Err(SignatureError::ConflictingDomain {
                name: name.to_string(),
                index,
            }),
            None => {
                info.arg_domain.insert(index, class);
                Ok(())
            }
        }
    }

    fn set_range(&mut self, name: &str, class: ClassRef) -> Result<(), SignatureError> {
        let keep_first = self.opts.keep_first_on_conflict;
        let info = self.entry(name);
        match &info.range {
            Some(existing) if *existing == class => Ok(()),
            Some(_) if keep_first => {
                self.report.conflicts += 1;
                Ok(())
            }
            Some(_) => Err(SignatureError::ConflictingRange {
                name: name.to_string(),
            }),
            None => {
                info.range = Some(class);
                Ok(())
            }
        }
    }

    fn visit(&mut self, f: &SumoFormula) -> Result<(), SignatureError> {
        match f {
            SumoFormula::Instance(a, b) => {
                if let (Some(x), Some(c)) = (ground_const(a), ground_const(b)) {
                    self.entry(x).instance_of.insert(c.to_string());
                    self.report.declarations += 1;
                }
            }
            SumoFormula::Subclass(a, b) => {
                if let (Some(x), Some(c)) = (ground_const(a), ground_const(b)) {
                    self.sig
                        .superclasses
                        .entry(x.to_string())
                        .or_default()
                        .insert(c.to_string());
                    self.report.declarations += 1;
                }
            }
            SumoFormula::Atom { head, spine } => {
                let crate::ast::Head::Const(h) = head else {
                    return Ok(());
                };
                let mode = match h.as_str() {
                    "domain" | "range" => DomainMode::Instance,
                    "domainSubclass" | "rangeSubclass" => DomainMode::Subclass,
                    "subrelation" => DomainMode::Instance,
                    _ => return Ok(()),
                };
                let shown = f.to_string();
                let args = declaration_args(spine)
                    .ok_or_else(|| SignatureError::NonGroundDeclaration(shown.clone()))?;
                if !f.free_vars().is_empty() {
                    return Err(SignatureError::NonGroundDeclaration(shown));
                }
                match (h.as_str(), args) {
                    ("domain" | "domainSubclass", [r, SumoTerm::Rat(q), c]) => {
                        let (Some(r), Some(c)) = (ground_const(r), ground_const(c)) else {
                            return Err(SignatureError::MalformedDeclaration(shown));
                        };
                        let index = u32::try_from(q.numerator)
                            .ok()
                            .filter(|&i| q.scale == 0 && i >= 1)
                            .ok_or_else(|| SignatureError::MalformedDeclaration(shown.clone()))?;
                        self.set_domain(
                            r,
                            index,
                            ClassRef {
                                class: c.to_string(),
                                mode,
                            },
                        )?;
                    }
                    ("range" | "rangeSubclass", [r, c]) => {
                        let (Some(r), Some(c)) = (ground_const(r), ground_const(c)) else {
                            return Err(SignatureError::MalformedDeclaration(shown));
                        };
                        self.set_range(
                            r,
                            ClassRef {
                                class: c.to_string(),
                                mode,
                            },
                        )?;
                    }
                    ("subrelation", [r, s]) => {
                        let (Some(r), Some(s)) = (ground_const(r), ground_const(s)) else {
                            return Err(SignatureError::MalformedDeclaration(shown));
                        };
                        self.entry(r).subrelation_of.insert(s.to_string());
                    }
                    _ => return Err(SignatureError::MalformedDeclaration(shown)),
                }
                self.report.declarations += 1;
            }
            _ => {}
        }
        Ok(())
    }

    /// Copies undeclared slots and ranges down subrelation edges until stable.
    fn inherit(&mut self) {
        loop {
            let mut changed = false;
            let names: Vec<String> = self.sig.consts.keys().cloned().collect();
            for name in &names {
                let supers = self.sig.consts[name].subrelation_of.clone();
                for sup in supers {
                    let Some(sup_info) = self.sig.consts.get(&sup).cloned() else {
                        continue;
                    };
                    let info = self.sig.consts.get_mut(name).expect("present");
                    for (index, class) in &sup_info.arg_domain {
                        if !info.arg_domain.contains_key(index) {
                            info.arg_domain.insert(*index, class.clone());
                            info.inherited.insert(*index);
                            changed = true;
                        }
                    }
                    if info.range.is_none() && sup_info.range.is_some() {
                        info.range = sup_info.range.clone();
                        info.range_inherited = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn finalize(&mut self) {
        for info in self.sig.consts.values_mut() {
            let max = info.arg_domain.keys().next_back().copied().unwrap_or(0);
            for i in 1..=max {
                if let std::collections::btree_map::Entry::Vacant(e) = info.arg_domain.entry(i) {
                    e.insert(ClassRef::instance(TOP_CLASS));
                    info.filled.insert(i);
                }
            }
            info.min_arity = max;
        }
    }
}

/// Records every typing declaration among the top-level assertions.
pub fn collect(assertions: &[SumoFormula]) -> Result<Signature, SignatureError> {
    collect_with(assertions, CollectOptions::default()).map(|(s, _)| s)
}

pub fn collect_with(
    assertions: &[SumoFormula],
    opts: CollectOptions,
) -> Result<(Signature, AnalysisReport), SignatureError> {
    let mut c = Collector {
        sig: Signature::default(),
        report: AnalysisReport::default(),
        opts,
    };
    for f in assertions {
        c.visit(f)?;
    }
    c.inherit();
    c.finalize();
    Ok((c.sig, c.report))
}

/// Marks variable-arity constants. Returns the closed signature and the number of passes.
pub fn close_vararity_counted(mut sig: Signature) -> (Signature, u32) {
    let mut below: BTreeSet<String> = BTreeSet::from([VARIABLE_ARITY_RELATION.to_string()]);
    let mut vararity: BTreeSet<String> = BTreeSet::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let mut changed = false;
        let grown: Vec<String> = sig
            .superclasses
            .iter()
            .filter(|(sub, sups)| !below.contains(*sub) && sups.iter().any(|s| below.contains(s)))
            .map(|(sub, _)| sub.clone())
            .collect();
        for class in grown {
            changed |= below.insert(class);
        }
        for (name, info) in &sig.consts {
            if !vararity.contains(name) && info.instance_of.iter().any(|c| below.contains(c)) {
                vararity.insert(name.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (name, info) in sig.consts.iter_mut() {
        info.var_arity = vararity.contains(name);
        if info.var_arity && info.min_arity == 0 {
            info.min_arity = 1;
            info.arg_domain.insert(1, ClassRef::instance(TOP_CLASS));
            info.filled.insert(1);
        }
    }
    (sig, passes)
}

pub fn close_vararity(sig: Signature) -> Signature {
    close_vararity_counted(sig).0
}

/// Both passes in sequence, with the report's iteration count filled in.
pub fn analyze(
    assertions: &[SumoFormula],
    opts: CollectOptions,
) -> Result<(Signature, AnalysisReport), SignatureError> {
    let (sig, mut report) = collect_with(assertions, opts)?;
    let (sig, passes) = close_vararity_counted(sig);
    report.iterations = passes;
    Ok((sig, report))
}

impl Signature {
    pub fn get(&self, name: &str) -> Option<&ConstInfo> {
        self.consts.get(name)
    }

    pub fn vararity_set(&self) -> BTreeSet<&str> {
        self.consts
            .iter()
            .filter(|(_, i)| i.var_arity)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Names used as classes anywhere in the declarations.
    pub fn classes(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for info in self.consts.values() {
            out.extend(info.arg_domain.values().map(|c| c.class.as_str()));
            out.extend(info.range.iter().map(|c| c.class.as_str()));
            out.extend(info.instance_of.iter().map(String::as_str));
        }
        for (sub, sups) in &self.superclasses {
            out.insert(sub.as_str());
            out.extend(sups.iter().map(String::as_str));
        }
        out
    }

    /// Deterministic text dump, one constant per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} constants; domains and ranges propagate along subrelation",
            self.consts.len()
        );
        let class = |c: &ClassRef| match c.mode {
            DomainMode::Instance => c.class.clone(),
            DomainMode::Subclass => format!("sub({})", c.class),
        };
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        for (name, info) in &self.consts {
            let _ = write!(
                out,
                "{name} min={} var={} dom=[{}] range={}",
                info.min_arity,
                info.var_arity,
                join(&mut info.arg_domain.iter().map(|(i, c)| format!("{i}:{}", class(c)))),
                info.range.as_ref().map(class).unwrap_or_else(|| "-".into()),
            );
            let _ = write!(
                out,
                " sub=[{}] inst=[{}]",
                join(&mut info.subrelation_of.iter().cloned()),
                join(&mut info.instance_of.iter().cloned())
            );
            if !info.inherited.is_empty() {
                let _ = write!(
                    out,
                    " inherited=[{}]",
                    join(&mut info.inherited.iter().map(u32::to_string))
                );
            }
            if info.range_inherited {
                out.push_str(" range-inherited");
            }
            if !info.filled.is_empty() {
                let _ = write!(
                    out,
                    " filled=[{}]",
                    join(&mut info.filled.iter().map(u32::to_string))
                );
            }
            out.push('\n');
        }
        out
    }
}
