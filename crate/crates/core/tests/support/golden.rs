//! Expected host formulas written out by hand from the displayed translations,
//! with the list argument of `ap` wrapped in `listset`.

#![allow(dead_code)]

use sumok2set_core::host::{self, call, cst, iota_const, ivar, var, HostTerm, HostType};

fn s(name: &str) -> HostTerm {
    iota_const(&format!("s_{name}"))
}

fn row() -> HostTerm {
    var("rho", HostType::list())
}

fn p_ap(f: HostTerm, list: HostTerm) -> HostTerm {
    call("prop_of", [call("ap", [f, call("listset", [list])])])
}

fn cons(items: Vec<HostTerm>) -> HostTerm {
    items
        .into_iter()
        .rev()
        .fold(cst("nil"), |acc, x| call("cons", [x, acc]))
}

fn dom_of(r: HostTerm, rho: HostTerm) -> HostTerm {
    call(
        "dom_of",
        [call("vararity", [r.clone()]), call("arity", [r.clone()]), call("domseq", [r]), rho],
    )
}

fn domseqm(r: HostTerm, k: &str) -> HostTerm {
    call("domseqm", [r, cst(k)])
}

fn imps(items: Vec<HostTerm>) -> HostTerm {
    let mut it = items.into_iter().rev();
    let last = it.next().unwrap();
    it.fold(last, |acc, a| host::imp(a, acc))
}

fn ands(items: Vec<HostTerm>) -> HostTerm {
    let mut it = items.into_iter().rev();
    let last = it.next().unwrap();
    it.fold(last, |acc, a| host::and(a, acc))
}

/// The row-variable partition rule.
pub fn partition_row_rule() -> HostTerm {
    let (pa, ed, dd) = (s("partition"), s("exhaustiveDecomposition"), s("disjointDecomposition"));
    host::all(
        "rho",
        HostType::list(),
        imps(vec![
            dom_of(pa.clone(), row()),
            dom_of(ed.clone(), row()),
            dom_of(dd.clone(), row()),
            p_ap(pa, row()),
            ands(vec![p_ap(ed, row()), p_ap(dd, row())]),
        ]),
    )
}

/// The partition swap rule.
pub fn partition_swap_rule() -> HostTerm {
    let pa = s("partition");
    let (x, y, z) = (ivar("X"), ivar("Y"), ivar("Z"));
    let m = |v: &HostTerm, k| host::mem(v.clone(), domseqm(pa.clone(), k));
    let body = imps(vec![
        m(&x, "n0"),
        m(&y, "n1"),
        m(&z, "n2"),
        m(&z, "n1"),
        m(&y, "n2"),
        p_ap(pa.clone(), cons(vec![x.clone(), y.clone(), z.clone()])),
        p_ap(pa.clone(), cons(vec![x.clone(), z.clone(), y.clone()])),
    ]);
    host::all("X", HostType::Iota, host::all("Y", HostType::Iota, host::all("Z", HostType::Iota, body)))
}

/// Quantification over relations through `subrelation`.
pub fn subrelation_rule() -> HostTerm {
    let sr = s("subrelation");
    let (r1, r2) = (ivar("R1"), ivar("R2"));
    let body = imps(vec![
        host::mem(r1.clone(), domseqm(sr.clone(), "n0")),
        host::mem(r2.clone(), domseqm(sr.clone(), "n1")),
        host::mem(r1.clone(), s("Entity")),
        host::mem(r2.clone(), s("Entity")),
        dom_of(r1.clone(), row()),
        dom_of(r2.clone(), row()),
        ands(vec![
            p_ap(sr, cons(vec![r1.clone(), r2.clone()])),
            host::mem(r1.clone(), s("Predicate")),
            host::mem(r2.clone(), s("Predicate")),
            p_ap(r1, row()),
        ]),
        p_ap(r2, row()),
    ]);
    host::all(
        "R1",
        HostType::Iota,
        host::all("R2", HostType::Iota, host::all("rho", HostType::list(), body)),
    )
}

/// The class-formation assertion of the Earthlike planet query.
pub fn tqg27_kappa() -> HostTerm {
    let p = ivar("p");
    host::mem(
        s("o"),
        host::sep(
            "p",
            cst("univ1"),
            ands(vec![
                host::mem(p.clone(), s("Entity")),
                host::mem(p.clone(), domseqm(iota_const("s_attribute"), "n0")),
                host::mem(p.clone(), s("Planet")),
                p_ap(s("attribute"), cons(vec![p, s("Earthlike")])),
            ]),
        ),
    )
}
