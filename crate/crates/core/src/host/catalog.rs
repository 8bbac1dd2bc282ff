//! Background constants with their types and defining premises.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Catalog,
    RelationFact,
    Kb,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premise {
    pub name: String,
    pub formula: HostTerm,
    pub origin: Origin,
    /// Emitted with the `definition` role.
    pub definition: bool,
}

impl Premise {
    pub fn axiom(name: impl Into<String>, formula: HostTerm, origin: Origin) -> Self {
        Premise {
            name: name.into(),
            formula,
            origin,
            definition: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog name: {0}")]
    UnknownCatalogName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// Uninterpreted; no premises.
    Primitive,
    /// A single `def_<name>` equation.
    Definition,
    /// One or more axioms.
    Axioms,
}

pub struct Entry {
    pub name: &'static str,
    pub ty: HostType,
    pub kind: EntryKind,
    build: fn() -> Vec<(String, HostTerm)>,
}

impl Entry {
    pub fn premises(&self) -> Vec<Premise> {
        (self.build)()
            .into_iter()
            .map(|(name, formula)| Premise {
                name,
                formula,
                origin: Origin::Catalog,
                definition: self.kind == EntryKind::Definition,
            })
            .collect()
    }

    /// Catalog constants mentioned by this entry's premises, other than itself.
    pub fn dependencies(&self) -> BTreeSet<String> {
        let mut deps = BTreeSet::new();
        for (_, f) in (self.build)() {
            deps.extend(f.symbols());
        }
        deps.remove(self.name);
        deps
    }
}

fn i() -> HostType {
    HostType::Iota
}

fn o() -> HostType {
    HostType::Omicron
}

fn l() -> HostType {
    HostType::list()
}

fn ty(args: &[HostType], result: HostType) -> HostType {
    HostType::curried(args, result)
}

fn none() -> Vec<(String, HostTerm)> {
    Vec::new()
}

fn x() -> HostTerm {
    ivar("x")
}

fn y() -> HostTerm {
    ivar("y")
}

fn lv(name: &str) -> HostTerm {
    var(name, l())
}

fn def(name: &str, body: HostTerm) -> Vec<(String, HostTerm)> {
    let c = cst(name);
    let t = type_of(name).expect("catalog");
    vec![(format!("def_{name}"), eq(t, c, body))]
}

/// `∀x y. x∈reals → y∈reals → body`
fn on_reals(body: HostTerm) -> HostTerm {
    all(
        "x",
        i(),
        all(
            "y",
            i(),
            imp_chain(vec![mem(x(), cst("reals")), mem(y(), cst("reals"))], body),
        ),
    )
}

fn on_omega(body: HostTerm) -> HostTerm {
    all(
        "m",
        i(),
        all(
            "n",
            i(),
            imp_chain(vec![mem(ivar("m"), cst("omega")), mem(ivar("n"), cst("omega"))], body),
        ),
    )
}

fn pair_list(a: HostTerm, b: HostTerm) -> HostTerm {
    call("listset", [call("cons", [a, call("cons", [b, cst("nil")])])])
}

fn bridge(c: &str, op: &str) -> HostTerm {
    on_reals(eq_i(call("ap", [cst(c), pair_list(x(), y())]), call(op, [x(), y()])))
}

fn bridge_rel(c: &str, op: &str) -> HostTerm {
    on_reals(iff(
        prop_of(call("ap", [cst(c), pair_list(x(), y())])),
        call(op, [x(), y()]),
    ))
}

fn closed2(op: &str) -> HostTerm {
    on_reals(mem(call(op, [x(), y()]), cst("reals")))
}

fn nk(k: u32) -> String {
    format!("n{k}")
}

macro_rules! numeral_entry {
    ($k:literal) => {
        Entry {
            name: concat!("n", $k),
            ty: HostType::Iota,
            kind: EntryKind::Definition,
            build: || def(&nk($k), call("ordsucc", [cst(&nk($k - 1))])),
        }
    };
}

/// The full catalog, in emission order.
pub fn entries() -> &'static [Entry] {
    use std::sync::OnceLock;
    static CATALOG: OnceLock<Vec<Entry>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

fn build_catalog() -> Vec<Entry> {
    vec![
        Entry {
            name: "emptyset",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_emptyset".into(), all("x", i(), not(mem(x(), cst("emptyset")))))],
        },
        Entry {
            name: "in",
            ty: ty(&[i(), i()], o()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "subq",
            ty: ty(&[i(), i()], o()),
            kind: EntryKind::Definition,
            build: || {
                def(
                    "subq",
                    lam(
                        "X",
                        i(),
                        lam(
                            "Y",
                            i(),
                            all("x", i(), imp(mem(x(), ivar("X")), mem(x(), ivar("Y")))),
                        ),
                    ),
                )
            },
        },
        Entry {
            name: "power",
            ty: ty(&[i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![(
                    "ax_power".into(),
                    all(
                        "X",
                        i(),
                        all(
                            "Y",
                            i(),
                            iff(mem(ivar("Y"), call("power", [ivar("X")])), subq(ivar("Y"), ivar("X"))),
                        ),
                    ),
                )]
            },
        },
        Entry {
            name: "ordsucc",
            ty: ty(&[i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![(
                    "ax_ordsucc".into(),
                    all(
                        "x",
                        i(),
                        all(
                            "y",
                            i(),
                            iff(mem(y(), call("ordsucc", [x()])), or(mem(y(), x()), eq_i(y(), x()))),
                        ),
                    ),
                )]
            },
        },
        Entry {
            name: "omega",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    ("ax_omega_zero".into(), mem(cst("emptyset"), cst("omega"))),
                    (
                        "ax_omega_succ".into(),
                        all(
                            "n",
                            i(),
                            imp(
                                mem(ivar("n"), cst("omega")),
                                mem(call("ordsucc", [ivar("n")]), cst("omega")),
                            ),
                        ),
                    ),
                ]
            },
        },
        Entry {
            name: "n0",
            ty: i(),
            kind: EntryKind::Definition,
            build: || def("n0", cst("emptyset")),
        },
        numeral_entry!(1),
        numeral_entry!(2),
        numeral_entry!(3),
        numeral_entry!(4),
        numeral_entry!(5),
        numeral_entry!(6),
        numeral_entry!(7),
        numeral_entry!(8),
        numeral_entry!(9),
        numeral_entry!(10),
        Entry {
            name: "ord_add",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let (m, n) = (ivar("m"), ivar("n"));
                vec![
                    (
                        "ax_ord_add_zero".into(),
                        on_omega(eq_i(call("ord_add", [m.clone(), cst("n0")]), m.clone())),
                    ),
                    (
                        "ax_ord_add_succ".into(),
                        on_omega(eq_i(
                            call("ord_add", [m.clone(), call("ordsucc", [n.clone()])]),
                            call("ordsucc", [call("ord_add", [m, n])]),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "ord_mul",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let (m, n) = (ivar("m"), ivar("n"));
                vec![
                    (
                        "ax_ord_mul_zero".into(),
                        on_omega(eq_i(call("ord_mul", [m.clone(), cst("n0")]), cst("n0"))),
                    ),
                    (
                        "ax_ord_mul_succ".into(),
                        on_omega(eq_i(
                            call("ord_mul", [m.clone(), call("ordsucc", [n.clone()])]),
                            call("ord_add", [call("ord_mul", [m.clone(), n]), m]),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "ord_exp",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let (m, n) = (ivar("m"), ivar("n"));
                vec![
                    (
                        "ax_ord_exp_zero".into(),
                        on_omega(eq_i(call("ord_exp", [m.clone(), cst("n0")]), cst("n1"))),
                    ),
                    (
                        "ax_ord_exp_succ".into(),
                        on_omega(eq_i(
                            call("ord_exp", [m.clone(), call("ordsucc", [n.clone()])]),
                            call("ord_mul", [call("ord_exp", [m.clone(), n]), m]),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "ord_sub",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let (m, n) = (ivar("m"), ivar("n"));
                vec![
                    (
                        "ax_ord_sub_add".into(),
                        on_omega(eq_i(
                            call("ord_sub", [call("ord_add", [m.clone(), n.clone()]), n.clone()]),
                            m.clone(),
                        )),
                    ),
                    (
                        "ax_ord_sub_trunc".into(),
                        on_omega(imp(mem(m.clone(), n.clone()), eq_i(call("ord_sub", [m, n]), cst("n0")))),
                    ),
                ]
            },
        },
        Entry {
            name: "if_i",
            ty: ty(&[o(), i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let p = var("p", o());
                let quant = |body| all("p", o(), all("x", i(), all("y", i(), body)));
                vec![
                    (
                        "ax_if_true".into(),
                        quant(imp(p.clone(), eq_i(ite(p.clone(), x(), y()), x()))),
                    ),
                    (
                        "ax_if_false".into(),
                        quant(imp(not(p.clone()), eq_i(ite(p, x(), y()), y()))),
                    ),
                ]
            },
        },
        Entry {
            name: "tag",
            ty: ty(&[i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    (
                        "ax_untag_tag".into(),
                        all("x", i(), eq_i(call("untag", [call("tag", [x()])]), x())),
                    ),
                    (
                        "ax_tag_nonempty".into(),
                        all("x", i(), not(eq_i(call("tag", [x()]), cst("emptyset")))),
                    ),
                ]
            },
        },
        Entry {
            name: "untag",
            ty: ty(&[i()], i()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "nil",
            ty: l(),
            kind: EntryKind::Definition,
            build: || def("nil", lam("i", i(), cst("emptyset"))),
        },
        Entry {
            name: "cons",
            ty: ty(&[i(), l(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                let r = lv("l");
                let quant = |body| all("x", i(), all("l", l(), body));
                vec![
                    (
                        "ax_cons_zero".into(),
                        quant(eq_i(call("cons", [x(), r.clone(), cst("n0")]), call("tag", [x()]))),
                    ),
                    (
                        "ax_cons_succ".into(),
                        quant(all(
                            "i",
                            i(),
                            imp(
                                mem(ivar("i"), cst("omega")),
                                eq_i(
                                    call("cons", [x(), r.clone(), call("ordsucc", [ivar("i")])]),
                                    app(r.clone(), ivar("i")),
                                ),
                            ),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "len",
            ty: ty(&[l()], i()),
            kind: EntryKind::Definition,
            build: || {
                def(
                    "len",
                    lam(
                        "l",
                        l(),
                        sep(
                            "i",
                            cst("omega"),
                            not(eq_i(app(lv("l"), ivar("i")), cst("emptyset"))),
                        ),
                    ),
                )
            },
        },
        Entry {
            name: "listset",
            ty: ty(&[l()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![(
                    "ax_listset".into(),
                    all(
                        "l",
                        l(),
                        all(
                            "k",
                            l(),
                            imp(
                                all(
                                    "i",
                                    i(),
                                    imp(
                                        mem(ivar("i"), cst("omega")),
                                        eq_i(app(lv("l"), ivar("i")), app(lv("k"), ivar("i"))),
                                    ),
                                ),
                                eq_i(call("listset", [lv("l")]), call("listset", [lv("k")])),
                            ),
                        ),
                    ),
                )]
            },
        },
        Entry {
            name: "ap",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "prop_of",
            ty: ty(&[i()], o()),
            kind: EntryKind::Definition,
            build: || def("prop_of", lam("X", i(), mem(cst("emptyset"), ivar("X")))),
        },
        Entry {
            name: "bool_of",
            ty: ty(&[o()], i()),
            kind: EntryKind::Definition,
            build: || def("bool_of", lam("p", o(), ite(var("p", o()), cst("n1"), cst("n0")))),
        },
        Entry {
            name: "univ1",
            ty: i(),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "arity",
            ty: ty(&[i()], i()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "vararity",
            ty: ty(&[i()], o()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "domseq",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Primitive,
            build: none,
        },
        Entry {
            name: "domseqm",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Definition,
            build: || {
                let (r, n) = (ivar("r"), ivar("i"));
                let ar = call("arity", [r.clone()]);
                def(
                    "domseqm",
                    lam(
                        "r",
                        i(),
                        lam(
                            "i",
                            i(),
                            ite(
                                call("vararity", [r.clone()]),
                                call(
                                    "domseq",
                                    [r.clone(), ite(mem(n.clone(), ar.clone()), n.clone(), ar)],
                                ),
                                call("domseq", [r, n]),
                            ),
                        ),
                    ),
                )
            },
        },
        Entry {
            name: "dom_of_varar",
            ty: ty(&[i(), l(), l()], o()),
            kind: EntryKind::Definition,
            build: || {
                let (n, d, rho, k) = (ivar("n"), lv("D"), lv("r"), ivar("i"));
                let entry_ok = |dom: HostTerm| mem(call("untag", [app(rho.clone(), k.clone())]), dom);
                let body = conj(vec![
                    subq(n.clone(), call("len", [rho.clone()])),
                    all(
                        "i",
                        i(),
                        imp(mem(k.clone(), n.clone()), entry_ok(app(d.clone(), k.clone()))),
                    ),
                    all(
                        "i",
                        i(),
                        imp_chain(
                            vec![mem(k.clone(), call("len", [rho.clone()])), subq(n.clone(), k.clone())],
                            entry_ok(app(d.clone(), n.clone())),
                        ),
                    ),
                ]);
                def("dom_of_varar", lam("n", i(), lam("D", l(), lam("r", l(), body))))
            },
        },
        Entry {
            name: "dom_of_fixedar",
            ty: ty(&[i(), l(), l()], o()),
            kind: EntryKind::Definition,
            build: || {
                let (n, d, rho, k) = (ivar("n"), lv("D"), lv("r"), ivar("i"));
                let body = and(
                    eq_i(call("len", [rho.clone()]), n.clone()),
                    all(
                        "i",
                        i(),
                        imp(
                            mem(k.clone(), n),
                            mem(call("untag", [app(rho, k.clone())]), app(d, k)),
                        ),
                    ),
                );
                def("dom_of_fixedar", lam("n", i(), lam("D", l(), lam("r", l(), body))))
            },
        },
        Entry {
            name: "dom_of",
            ty: ty(&[o(), i(), l(), l()], o()),
            kind: EntryKind::Definition,
            build: || {
                let v = var("v", o());
                let args = || [ivar("n"), lv("D"), lv("r")];
                let body = and(
                    imp(v.clone(), call("dom_of_varar", args())),
                    imp(not(v), call("dom_of_fixedar", args())),
                );
                def(
                    "dom_of",
                    lam("v", o(), lam("n", i(), lam("D", l(), lam("r", l(), body)))),
                )
            },
        },
        Entry {
            name: "reals",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_nat_real".into(), subq(cst("omega"), cst("reals")))],
        },
        Entry {
            name: "real_add",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    ("ax_real_add_closed".into(), closed2("real_add")),
                    (
                        "ax_real_add_nat".into(),
                        on_omega(eq_i(
                            call("real_add", [ivar("m"), ivar("n")]),
                            call("ord_add", [ivar("m"), ivar("n")]),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "real_mul",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    ("ax_real_mul_closed".into(), closed2("real_mul")),
                    (
                        "ax_real_mul_nat".into(),
                        on_omega(eq_i(
                            call("real_mul", [ivar("m"), ivar("n")]),
                            call("ord_mul", [ivar("m"), ivar("n")]),
                        )),
                    ),
                ]
            },
        },
        Entry {
            name: "real_sub",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || vec![("ax_real_sub_closed".into(), closed2("real_sub"))],
        },
        Entry {
            name: "real_neg",
            ty: ty(&[i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![(
                    "ax_real_neg_closed".into(),
                    all(
                        "x",
                        i(),
                        imp(mem(x(), cst("reals")), mem(call("real_neg", [x()]), cst("reals"))),
                    ),
                )]
            },
        },
        Entry {
            name: "real_div",
            ty: ty(&[i(), i()], i()),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    ("ax_real_div_closed".into(), closed2("real_div")),
                    (
                        "ax_real_div_zero".into(),
                        all("x", i(), eq_i(call("real_div", [x(), cst("n0")]), cst("n0"))),
                    ),
                ]
            },
        },
        Entry {
            name: "real_lt",
            ty: ty(&[i(), i()], o()),
            kind: EntryKind::Axioms,
            build: || {
                vec![(
                    "ax_real_lt_irrefl".into(),
                    all("x", i(), imp(mem(x(), cst("reals")), not(call("real_lt", [x(), x()])))),
                )]
            },
        },
        Entry {
            name: "real_le",
            ty: ty(&[i(), i()], o()),
            kind: EntryKind::Axioms,
            build: || {
                vec![
                    (
                        "ax_real_le_lt".into(),
                        on_reals(iff(
                            call("real_le", [x(), y()]),
                            or(call("real_lt", [x(), y()]), eq_i(x(), y())),
                        )),
                    ),
                    (
                        "ax_real_lt_not_le".into(),
                        on_reals(imp(call("real_lt", [x(), y()]), not(call("real_le", [y(), x()])))),
                    ),
                ]
            },
        },
        Entry {
            name: "neg_reals",
            ty: i(),
            kind: EntryKind::Definition,
            build: || {
                def(
                    "neg_reals",
                    sep("x", cst("reals"), call("real_lt", [x(), cst("n0")])),
                )
            },
        },
        Entry {
            name: "nonneg_reals",
            ty: i(),
            kind: EntryKind::Definition,
            build: || {
                def(
                    "nonneg_reals",
                    sep("x", cst("reals"), call("real_le", [cst("n0"), x()])),
                )
            },
        },
        Entry {
            name: "c_add",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_add_real".into(), bridge("c_add", "real_add"))],
        },
        Entry {
            name: "c_sub",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_sub_real".into(), bridge("c_sub", "real_sub"))],
        },
        Entry {
            name: "c_mult",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_mult_real".into(), bridge("c_mult", "real_mul"))],
        },
        Entry {
            name: "c_div",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_div_real".into(), bridge("c_div", "real_div"))],
        },
        Entry {
            name: "c_lessthan",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_lessthan_real".into(), bridge_rel("c_lessthan", "real_lt"))],
        },
        Entry {
            name: "c_leq",
            ty: i(),
            kind: EntryKind::Axioms,
            build: || vec![("ax_leq_real".into(), bridge_rel("c_leq", "real_le"))],
        },
    ]
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    entries().iter().find(|e| e.name == name)
}

pub fn type_of(name: &str) -> Option<HostType> {
    entry(name).map(|e| e.ty.clone())
}

pub fn is_catalog_name(name: &str) -> bool {
    entry(name).is_some()
}

/// Transitive dependency closure of `needed`, in catalog order.
pub fn closure(needed: &BTreeSet<String>) -> Result<Vec<&'static str>, CatalogError> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut stack: Vec<String> = needed.iter().cloned().collect();
    while let Some(n) = stack.pop() {
        let e = entry(&n).ok_or_else(|| CatalogError::UnknownCatalogName(n.clone()))?;
        if seen.insert(n) {
            stack.extend(e.dependencies());
        }
    }
    Ok(entries()
        .iter()
        .filter(|e| seen.contains(e.name))
        .map(|e| e.name)
        .collect())
}

/// Premises for the needed constants and their dependencies, each after everything it uses.
pub fn background(needed: &BTreeSet<String>) -> Result<Vec<Premise>, CatalogError> {
    let names = closure(needed)?;
    let position: BTreeMap<&str, usize> =
        entries().iter().enumerate().map(|(k, e)| (e.name, k)).collect();
    let mut emitted: BTreeSet<&str> = BTreeSet::new();
    let mut order: Vec<&str> = Vec::new();
    // Kahn's algorithm; ties broken by catalog position.
    let mut pending: Vec<&str> = names.clone();
    while !pending.is_empty() {
        let next = pending
            .iter()
            .copied()
            .filter(|n| {
                entry(n)
                    .expect("closed")
                    .dependencies()
                    .iter()
                    .all(|d| emitted.contains(d.as_str()))
            })
            .min_by_key(|n| position[n])
            .unwrap_or_else(|| {
                let stuck: Vec<(&str, BTreeSet<String>)> = pending
                    .iter()
                    .map(|n| (*n, entry(n).expect("closed").dependencies()))
                    .collect();
                panic!("catalog dependencies are cyclic: {stuck:?}")
            });
        emitted.insert(next);
        order.push(next);
        pending.retain(|n| *n != next);
    }
    Ok(order
        .into_iter()
        .flat_map(|n| entry(n).expect("closed").premises())
        .collect())
}
