//! Hereditarily finite sets, interned per thread, and a bounded evaluator over them.

pub mod eval;
pub mod lemma;
pub mod rational;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;

pub use eval::{Domain, EvalError, Evaluator, Value};
pub use lemma::{check_identity, check_lemma, parse_lemmas, Generators, Lemma, LemmaError, Verdict};
pub use rational::{eval_rational, RationalError};

/// A hereditarily finite set. Handles are only meaningful on the thread that made them.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hf(u32, PhantomData<*const ()>);

struct Node {
    elems: Vec<Hf>,
    ordinal: Option<u32>,
    rank: u32,
}

#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    index: HashMap<Vec<u32>, u32>,
    ordinals: Vec<Hf>,
}

thread_local! {
    static STORE: RefCell<Store> = RefCell::new(Store::default());
}

impl Store {
    fn intern(&mut self, mut elems: Vec<Hf>) -> Hf {
        elems.sort();
        elems.dedup();
        let key: Vec<u32> = elems.iter().map(|e| e.0).collect();
        if let Some(&id) = self.index.get(&key) {
            return Hf(id, PhantomData);
        }
        let rank = elems.iter().map(|e| self.nodes[e.0 as usize].rank + 1).max().unwrap_or(0);
        // {0,…,k-1} is the ordinal k.
        let mut seen = vec![false; elems.len()];
        let all_small = elems.iter().all(|e| match self.nodes[e.0 as usize].ordinal {
            Some(k) if (k as usize) < seen.len() => {
                seen[k as usize] = true;
                true
            }
            _ => false,
        });
        let ordinal = (all_small && seen.iter().all(|s| *s)).then_some(elems.len() as u32);
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            elems,
            ordinal,
            rank,
        });
        self.index.insert(key, id);
        Hf(id, PhantomData)
    }
}

fn with<T>(f: impl FnOnce(&mut Store) -> T) -> T {
    STORE.with(|s| f(&mut s.borrow_mut()))
}

impl Hf {
    pub fn empty() -> Hf {
        Hf::set(Vec::new())
    }

    /// Duplicates and order are irrelevant.
    pub fn set(elems: impl IntoIterator<Item = Hf>) -> Hf {
        let v: Vec<Hf> = elems.into_iter().collect();
        with(|s| s.intern(v))
    }

    pub fn singleton(x: Hf) -> Hf {
        Hf::set([x])
    }

    pub fn pair(a: Hf, b: Hf) -> Hf {
        Hf::set([a, b])
    }

    /// `{{a},{a,b}}`
    pub fn kpair(a: Hf, b: Hf) -> Hf {
        Hf::pair(Hf::singleton(a), Hf::pair(a, b))
    }

    pub fn ordinal(k: u32) -> Hf {
        if let Some(h) = with(|s| s.ordinals.get(k as usize).copied()) {
            return h;
        }
        let mut cur = with(|s| s.ordinals.len());
        while cur <= k as usize {
            let elems = with(|s| s.ordinals.clone());
            let h = Hf::set(elems);
            with(|s| s.ordinals.push(h));
            cur += 1;
        }
        with(|s| s.ordinals[k as usize])
    }

    pub fn elems(self) -> Vec<Hf> {
        with(|s| s.nodes[self.0 as usize].elems.clone())
    }

    pub fn card(self) -> usize {
        with(|s| s.nodes[self.0 as usize].elems.len())
    }

    pub fn is_empty(self) -> bool {
        self.card() == 0
    }

    pub fn contains(self, x: Hf) -> bool {
        with(|s| s.nodes[self.0 as usize].elems.binary_search(&x).is_ok())
    }

    pub fn subset_of(self, other: Hf) -> bool {
        self.elems().into_iter().all(|e| other.contains(e))
    }

    pub fn union(self, other: Hf) -> Hf {
        Hf::set(self.elems().into_iter().chain(other.elems()))
    }

    /// `x ∪ {x}`
    pub fn succ(self) -> Hf {
        Hf::set(self.elems().into_iter().chain([self]))
    }

    pub fn as_ordinal(self) -> Option<u32> {
        with(|s| s.nodes[self.0 as usize].ordinal)
    }

    pub fn rank(self) -> u32 {
        with(|s| s.nodes[self.0 as usize].rank)
    }

    /// The `y` with `y ∪ {y} = self`, if any.
    pub fn pred(self) -> Option<Hf> {
        self.elems().into_iter().find(|y| y.succ() == self)
    }

    /// The sole element of a singleton.
    pub fn sole(self) -> Option<Hf> {
        match self.elems().as_slice() {
            [x] => Some(*x),
            _ => None,
        }
    }

    /// All sets of rank at most `r`, empty set first.
    pub fn up_to_rank(r: u32) -> Vec<Hf> {
        let mut level: Vec<Hf> = Vec::new();
        for _ in 0..=r {
            let n = level.len();
            assert!(n < 20, "rank bound too large to enumerate");
            level = (0u32..1 << n)
                .map(|mask| Hf::set((0..n).filter(|k| mask >> k & 1 == 1).map(|k| level[k])))
                .collect();
        }
        level
    }
}

impl fmt::Display for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.as_ordinal() {
            return write!(f, "{k}");
        }
        f.write_str("{")?;
        for (k, e) in self.elems().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hf({self})")
    }
}

/// A list as a finite table from indices to tagged entries; missing indices are `∅`.
pub fn list_table(entries: &[Hf]) -> BTreeMap<Hf, Hf> {
    entries
        .iter()
        .enumerate()
        .map(|(k, e)| (Hf::ordinal(k as u32), Hf::singleton(*e)))
        .collect()
}
